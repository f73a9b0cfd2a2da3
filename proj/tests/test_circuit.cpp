#include <gtest/gtest.h>

#include <numbers>

#include "qnp/circuit.hpp"
#include "test_support.hpp"

using namespace qnp;
using qnp::testing::Gen;

namespace {

StateVector random_state(Gen& g, int n) {
  std::vector<double> v(std::size_t{1} << n);
  for (auto& x : v) x = g.uniform();
  return amplitude_encode(v, n);
}

double distance(const StateVector& a, const StateVector& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) d = std::max(d, std::abs(a.amplitude(i) - b.amplitude(i)));
  return d;
}

}  // namespace

TEST(Circuit, RejectsBadQubits) {
  Circuit c(2);
  EXPECT_THROW(c.add({GateKind::kH, {2, -1}, 0.0, ""}), QubitIndexError);
  EXPECT_THROW(c.add({GateKind::kCNOT, {1, 1}, 0.0, ""}), QubitIndexError);
}

TEST(Circuit, DepthIsAsapLayering) {
  Circuit c(3);
  c.add({GateKind::kH, {0, -1}, 0.0, "a"});
  c.add({GateKind::kH, {1, -1}, 0.0, "a"});  // parallel with the first
  c.add({GateKind::kCNOT, {0, 1}, 0.0, "b"});
  c.add({GateKind::kH, {2, -1}, 0.0, "b"});  // parallel
  c.add({GateKind::kGlobalPhase, {-1, -1}, 0.3, "b"});
  EXPECT_EQ(c.gate_count(), 4u);
  EXPECT_EQ(c.depth(), 2u);
  EXPECT_EQ(c.gate_count_by_stage().at("a"), 2u);
}

TEST(Circuit, QftLadderMatchesDenseQft) {
  Gen g;
  for (int m = 1; m <= 4; ++m) {
    const int n = m + 1;
    std::vector<int> reg;
    for (int q = 1; q <= m; ++q) reg.push_back(q);
    const StateVector s = random_state(g, n);
    for (bool inv : {false, true}) {
      StateVector a = s;
      execute(a, qft_circuit(n, reg, inv));
      StateVector b = s;
      b.qft(QubitRegister{"r", reg}, inv);
      EXPECT_LT(distance(a, b), 1e-12) << "m=" << m << " inverse=" << inv;
    }
  }
}

TEST(Circuit, InverseUndoes) {
  Gen g;
  const std::vector<double> amps{0.1, -0.5, 0.3, 0.2, 0.0, 0.4, -0.6, 0.28};
  const Circuit prep = state_preparation_circuit(3, {0, 1, 2}, amps);
  const StateVector s = random_state(g, 3);
  StateVector t = s;
  execute(t, prep);
  execute(t, prep.inverse());
  EXPECT_LT(distance(s, t), 1e-12);
}

TEST(Circuit, StatePreparationHitsSignedTarget) {
  Gen g;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> a(16);
    double sq = 0.0;
    for (auto& x : a) {
      x = g.integer(0, 3) == 0 ? 0.0 : g.uniform();
      sq += x * x;
    }
    for (auto& x : a) x /= std::sqrt(sq);
    StateVector s(4);
    execute(s, state_preparation_circuit(4, {0, 1, 2, 3}, a));
    for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(s.amplitude(i).real(), a[i], 1e-12);
    EXPECT_EQ(state_preparation_circuit(4, {0, 1, 2, 3}, a).gate_count(), 29u);
  }
}

TEST(Circuit, UniformlyControlledRotationAppliesPerBranchAngle) {
  const std::vector<double> angles{0.3, -1.1, 2.0, 0.7};
  const Circuit c = uniformly_controlled_rotation(3, GateKind::kRY, {0, 1}, 2, angles, "ucr");
  for (std::size_t branch = 0; branch < 4; ++branch) {
    StateVector s(3);
    if (branch & 2) s.pauli_x(0);
    if (branch & 1) s.pauli_x(1);
    execute(s, c);
    const std::size_t base = branch << 1;
    EXPECT_NEAR(s.amplitude(base).real(), std::cos(angles[branch] / 2), 1e-12);
    EXPECT_NEAR(s.amplitude(base | 1).real(), std::sin(angles[branch] / 2), 1e-12);
  }
}

TEST(Circuit, DiagonalAppliesPhases) {
  Gen g;
  std::vector<double> ph(8);
  for (auto& p : ph) p = g.uniform(-3.0, 3.0);
  const Circuit c = diagonal_circuit(3, {0, 1, 2}, ph);
  for (std::size_t x = 0; x < 8; ++x) {
    std::vector<Complex> a(8, 0.0);
    a[x] = 1.0;
    StateVector s = StateVector::from_amplitudes(a);
    execute(s, c);
    EXPECT_NEAR(std::abs(s.amplitude(x) - std::polar(1.0, ph[x])), 0.0, 1e-12);
  }
}
