#include <gtest/gtest.h>

#include <cmath>

#include "qnp/qconv.hpp"
#include "qnp/stencils.hpp"
#include "test_support.hpp"

using namespace qnp;
using qnp::testing::Gen;

TEST(Lcu, DecompositionOfLaplacian) {
  const LcuDecomposition d = decompose_kernel(laplacian_fdm_kernel(1.0));
  EXPECT_EQ(d.terms.size(), 5u);
  EXPECT_DOUBLE_EQ(d.lambda, 8.0);
  // |-4| / 8 at the centre slot 4*1+1
  EXPECT_NEAR(d.prepare_amplitudes[5], std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(d.prepare_amplitudes[lcu_slot(-1, 0)], std::sqrt(0.125), 1e-15);
  EXPECT_EQ(d.prepare_amplitudes[0], 0.0);
  double sq = 0.0;
  for (double a : d.prepare_amplitudes) sq += a * a;
  EXPECT_NEAR(sq, 1.0, 1e-15);
}

TEST(Lcu, ZeroKernelIsDegenerate) { EXPECT_THROW(decompose_kernel(Kernel3x3{}), DegenerateOperator); }

TEST(Lcu, PhaseScheduleEncodesShifts) {
  const LcuDecomposition d = decompose_kernel(central_convection_kernel(1.0, 1.0, 1.0));
  const ShiftPhaseSchedule s = shift_phase_schedule(d, 2, 3);
  ASSERT_EQ(s.programs.size(), 4u);
  for (const auto& p : s.programs) {
    ASSERT_EQ(p.row_phases.size(), 4u);
    ASSERT_EQ(p.col_phases.size(), 8u);
    for (std::size_t j = 0; j < 8; ++j) {
      EXPECT_NEAR(std::arg(p.col_phases[j] * std::polar(1.0, -2.0 * M_PI * j * p.col_offset / 8.0)), 0.0, 1e-12);
    }
  }
  // unused slots carry no phase
  EXPECT_EQ(s.phase(0, 1, 1), Complex(1.0, 0.0));
  EXPECT_THROW(shift_phase_schedule(d, 0, 2), InvalidArgument);
}

TEST(QuantumConvolve, IdentityKernelReturnsInterior) {
  Gen g;
  const Array2D b = g.array(4, 4);
  const Array2D out = quantum_convolve_block(b, Kernel3x3::identity());
  EXPECT_LT(max_abs_diff(out, b.sub(1, 1, 2, 2)), 1e-12);
}

TEST(QuantumConvolve, LaplacianOfQuadratic) {
  // x^2 + y^2 on unit cells: +lap = 4 everywhere
  Array2D b(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) b(i, j) = i * i + j * j;
  }
  const Array2D out = quantum_convolve_block(b, laplacian_fdm_kernel(1.0));
  for (double v : out.storage()) EXPECT_NEAR(v, 4.0, 1e-12);
}

TEST(QuantumConvolve, ConstantBlockUnderLaplacianIsZero) {
  const Array2D out = quantum_convolve_block(Array2D(4, 4, 2.5), laplacian_fdm_kernel(1.0));
  for (double v : out.storage()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(QuantumConvolve, ZeroBlockShortCircuits) {
  const Array2D out = quantum_convolve_block(Array2D(5, 5, 0.0), laplacian_fdm_kernel(1.0));
  EXPECT_EQ(out, Array2D(3, 3, 0.0));
}

TEST(QuantumConvolve, ShapeErrors) {
  EXPECT_THROW(quantum_convolve_block(Array2D(3, 3, 1.0), Kernel3x3::identity()), InvalidArgument);
  EXPECT_THROW(quantum_convolve_block(Array2D(4, 5, 1.0), Kernel3x3::identity()), ShapeMismatch);
  EXPECT_THROW(QuantumConvolver(Kernel3x3::identity(), 4).convolve(Array2D(5, 5, 1.0)), ShapeMismatch);
}

TEST(QuantumConvolve, MatchesClassicalOnRandomBlocks) {
  Gen g;
  for (int K : {4, 5, 6, 8, 9}) {
    for (int t = 0; t < 20; ++t) {
      const Array2D b = g.array(K, K, -10.0, 10.0);
      const Kernel3x3 k = g.kernel();
      EXPECT_LT(max_abs_diff(quantum_convolve_block(b, k), qnp::testing::correlate_valid(b, k)), 1e-10)
          << "K=" << K;
    }
  }
}

TEST(QuantumConvolve, SuccessAmplitudeMatchesBlockEncodingNorm) {
  // ||A x|| = lambda * ||x|| * success, with A x the circular convolution on the padded register
  Gen g;
  const Kernel3x3 k = convfem_convection_kernel(0.3, -0.7, 0.5);
  const QuantumConvolver conv(k, 4);
  const Array2D b = g.array(4, 4);
  StateVector s = conv.encode(b);
  conv.run_circuit(s);
  const auto proj = project_ancilla_zero(s, conv.ancilla());
  const Array2D full = circular_convolve(b, k);
  EXPECT_NEAR(conv.decomposition().lambda * l2_norm(b) * proj.success_amplitude, l2_norm(full), 1e-12);
}

TEST(GateCircuit, MatchesDenseSimulationAfterPostSelection) {
  Gen g;
  for (int K : {4, 8}) {
    const Kernel3x3 k = g.kernel();
    const QuantumConvolver conv(k, K);
    const Circuit c = convolution_circuit(conv.decomposition(), K);
    const Array2D b = g.array(K, K);
    StateVector dense = conv.encode(b);
    conv.run_circuit(dense);
    StateVector gates = conv.encode(b);
    execute(gates, c);
    const auto p1 = project_ancilla_zero(dense, conv.ancilla());
    const auto p2 = project_ancilla_zero(gates, conv.ancilla());
    EXPECT_NEAR(p1.success_amplitude, p2.success_amplitude, 1e-12);
    for (std::size_t i = 0; i < p1.state.dim(); ++i) {
      EXPECT_NEAR(std::abs(p1.state.amplitude(i) - p2.state.amplitude(i)), 0.0, 1e-10);
    }
  }
}

TEST(CircuitStats, QubitsAndGateTotals) {
  for (int K : {4, 5, 8, 16, 32}) {
    const CircuitStats s = circuit_stats(K);
    int m = 0;
    while ((1 << m) < K) ++m;
    EXPECT_EQ(s.n_qubits, 4 + 2 * m);
    EXPECT_EQ(s.gate_count, qnp::testing::expected_gate_count(K)) << "K=" << K;
    std::size_t staged = 0;
    for (const auto& [stage, n] : s.gates_by_stage) staged += n;
    EXPECT_EQ(staged, s.gate_count);
    EXPECT_LE(s.depth, s.gate_count);
  }
  EXPECT_EQ(circuit_stats(4).n_qubits, 8);
  EXPECT_THROW(circuit_stats(3), InvalidArgument);
}

TEST(CircuitStats, DepthGrowsSlowlyWithWindow) {
  EXPECT_LE(circuit_stats(16).depth, 2.5 * circuit_stats(4).depth);
  EXPECT_LE(circuit_stats(32).depth, 3.0 * circuit_stats(4).depth);
}
