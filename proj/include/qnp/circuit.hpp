#ifndef QNP_CIRCUIT_HPP
#define QNP_CIRCUIT_HPP

// Elementary-gate circuits: a flat gate list that can be executed on a
// StateVector and measured for gate count and depth.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qnp/errors.hpp"
#include "qnp/statevector.hpp"

namespace qnp {

enum class GateKind {
  kH,
  kX,
  kRY,    ///< exp(-i theta Y / 2)
  kRZ,    ///< diag(e^{-i theta/2}, e^{i theta/2})
  kP,     ///< diag(1, e^{i theta})
  kCP,    ///< controlled P, symmetric in its two qubits
  kCNOT,  ///< qubits[0] controls qubits[1]
  kSWAP,
  kGlobalPhase,  ///< e^{i theta} on the whole state; not a physical gate
};

struct Gate {
  GateKind kind;
  std::array<int, 2> qubits{-1, -1};
  double angle = 0.0;
  /// Which stage of the circuit emitted the gate (for per-stage accounting).
  std::string stage;

  int arity() const noexcept {
    switch (kind) {
      case GateKind::kGlobalPhase:
        return 0;
      case GateKind::kCP:
      case GateKind::kCNOT:
      case GateKind::kSWAP:
        return 2;
      default:
        return 1;
    }
  }
};

class Circuit {
 public:
  explicit Circuit(int n_qubits) : n_qubits_(n_qubits) {}

  int n_qubits() const noexcept { return n_qubits_; }
  const std::vector<Gate>& gates() const noexcept { return gates_; }

  void add(Gate g) {
    for (int k = 0; k < g.arity(); ++k) {
      if (g.qubits[k] < 0 || g.qubits[k] >= n_qubits_) throw QubitIndexError("gate qubit out of range");
    }
    if (g.arity() == 2 && g.qubits[0] == g.qubits[1]) throw QubitIndexError("two-qubit gate on a single qubit");
    gates_.push_back(std::move(g));
  }
  void append(const Circuit& other) {
    for (const auto& g : other.gates_) add(g);
  }

  /// Physical gates (global phase excluded).
  std::size_t gate_count() const {
    return static_cast<std::size_t>(
        std::count_if(gates_.begin(), gates_.end(), [](const Gate& g) { return g.arity() > 0; }));
  }

  std::map<std::string, std::size_t> gate_count_by_stage() const {
    std::map<std::string, std::size_t> out;
    for (const auto& g : gates_) {
      if (g.arity() > 0) ++out[g.stage];
    }
    return out;
  }

  /// ASAP layering: each gate starts right after the latest gate on any of
  /// its qubits.
  std::size_t depth() const {
    std::vector<std::size_t> level(static_cast<std::size_t>(n_qubits_), 0);
    std::size_t d = 0;
    for (const auto& g : gates_) {
      const int a = g.arity();
      if (a == 0) continue;
      std::size_t start = 0;
      for (int k = 0; k < a; ++k) start = std::max(start, level[static_cast<std::size_t>(g.qubits[k])]);
      for (int k = 0; k < a; ++k) level[static_cast<std::size_t>(g.qubits[k])] = start + 1;
      d = std::max(d, start + 1);
    }
    return d;
  }

  /// The adjoint circuit.
  Circuit inverse() const {
    Circuit inv(n_qubits_);
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
      Gate g = *it;
      switch (g.kind) {
        case GateKind::kRY:
        case GateKind::kRZ:
        case GateKind::kP:
        case GateKind::kCP:
        case GateKind::kGlobalPhase:
          g.angle = -g.angle;
          break;
        default:
          break;
      }
      inv.gates_.push_back(g);
    }
    return inv;
  }

  void relabel_stage(const std::string& stage) {
    for (auto& g : gates_) g.stage = stage;
  }

 private:
  int n_qubits_;
  std::vector<Gate> gates_;
};

namespace detail {

inline std::vector<Complex> one_qubit_matrix(const Gate& g) {
  const double t = g.angle;
  switch (g.kind) {
    case GateKind::kRY:
      return {std::cos(t / 2), -std::sin(t / 2), std::sin(t / 2), std::cos(t / 2)};
    case GateKind::kRZ:
      return {std::polar(1.0, -t / 2), 0.0, 0.0, std::polar(1.0, t / 2)};
    default:
      throw InvalidArgument("not a parametrised one-qubit gate");
  }
}

}  // namespace detail

/// Runs the gate on the state in place.
inline void execute(StateVector& state, const Gate& g) {
  switch (g.kind) {
    case GateKind::kH:
      state.hadamard(g.qubits[0]);
      return;
    case GateKind::kX:
      state.pauli_x(g.qubits[0]);
      return;
    case GateKind::kRY:
    case GateKind::kRZ: {
      const auto m = detail::one_qubit_matrix(g);
      state.register_unitary(QubitRegister{"", {g.qubits[0]}}, m);
      return;
    }
    case GateKind::kP:
      state.controlled_phase({}, g.qubits[0], g.angle);
      return;
    case GateKind::kCP: {
      const std::array<Control, 1> c{Control{g.qubits[0], true}};
      state.controlled_phase(c, g.qubits[1], g.angle);
      return;
    }
    case GateKind::kCNOT: {
      const std::vector<Complex> cx{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0};
      state.register_unitary(QubitRegister{"", {g.qubits[0], g.qubits[1]}}, cx);
      return;
    }
    case GateKind::kSWAP: {
      const std::vector<Complex> sw{1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1};
      state.register_unitary(QubitRegister{"", {g.qubits[0], g.qubits[1]}}, sw);
      return;
    }
    case GateKind::kGlobalPhase: {
      // e^{i t} on every amplitude == P(t) on a qubit preceded and followed by
      // the same phase on its complement
      const int q = 0;
      state.controlled_phase({}, q, g.angle);
      state.pauli_x(q);
      state.controlled_phase({}, q, g.angle);
      state.pauli_x(q);
      return;
    }
  }
}

inline void execute(StateVector& state, const Circuit& c) {
  if (c.n_qubits() != state.n_qubits()) throw QubitIndexError("circuit and state qubit counts differ");
  for (const auto& g : c.gates()) execute(state, g);
}

/// Textbook QFT ladder (H, controlled phases, final swaps) realising
/// |j> -> 2^{-m/2} sum_k e^{+i 2 pi j k / 2^m} |k> on a big-endian register.
inline Circuit qft_circuit(int n_qubits, const std::vector<int>& reg, bool inverse = false,
                           const std::string& stage = "qft") {
  Circuit c(n_qubits);
  const int m = static_cast<int>(reg.size());
  for (int i = 0; i < m; ++i) {
    c.add({GateKind::kH, {reg[i], -1}, 0.0, stage});
    for (int k = i + 1; k < m; ++k) {
      const double angle = 2.0 * std::numbers::pi / static_cast<double>(1 << (k - i + 1));
      c.add({GateKind::kCP, {reg[k], reg[i]}, angle, stage});
    }
  }
  for (int i = 0; i < m / 2; ++i) c.add({GateKind::kSWAP, {reg[i], reg[m - 1 - i]}, 0.0, stage});
  if (!inverse) return c;
  Circuit inv = c.inverse();
  inv.relabel_stage(stage);
  return inv;
}

/// Uniformly controlled rotation: for control value c (big-endian over
/// `controls`) the target is rotated by angles[c]. Gray-code CNOT ladder with
/// 2^k rotations and 2^k CNOTs (none when k = 0).
inline Circuit uniformly_controlled_rotation(int n_qubits, GateKind rotation, const std::vector<int>& controls,
                                             int target, std::span<const double> angles,
                                             const std::string& stage) {
  const std::size_t k = controls.size();
  const std::size_t count = std::size_t{1} << k;
  if (angles.size() != count) throw InvalidArgument("uniformly controlled rotation needs 2^k angles");
  Circuit c(n_qubits);
  if (k == 0) {
    c.add({rotation, {target, -1}, angles[0], stage});
    return c;
  }
  auto gray = [](std::size_t i) { return i ^ (i >> 1); };
  for (std::size_t i = 0; i < count; ++i) {
    // beta_i = 2^{-k} sum_c (-1)^{popcount(c & gray(i))} alpha_c
    double beta = 0.0;
    for (std::size_t cv = 0; cv < count; ++cv) {
      const double s = (std::popcount(cv & gray(i)) % 2) ? -1.0 : 1.0;
      beta += s * angles[cv];
    }
    beta /= static_cast<double>(count);
    c.add({rotation, {target, -1}, beta, stage});
    const std::size_t changed = gray(i) ^ gray((i + 1) % count);
    const int bit = std::countr_zero(changed);
    c.add({GateKind::kCNOT, {controls[k - 1 - static_cast<std::size_t>(bit)], target}, 0.0, stage});
  }
  return c;
}

/// Real, nonnegative-or-signed amplitude preparation from |0...0> on `reg`
/// (Mottonen rotation tree of uniformly controlled RY gates).
inline Circuit state_preparation_circuit(int n_qubits, const std::vector<int>& reg, std::span<const double> amplitudes,
                                         const std::string& stage = "prepare") {
  const std::size_t m = reg.size();
  if (amplitudes.size() != (std::size_t{1} << m)) throw InvalidArgument("amplitude count does not match register");
  Circuit c(n_qubits);
  for (std::size_t level = 0; level < m; ++level) {
    const std::size_t branches = std::size_t{1} << level;
    const std::size_t span_len = std::size_t{1} << (m - level);  // amplitudes under one prefix
    std::vector<double> angles(branches);
    for (std::size_t b = 0; b < branches; ++b) {
      const std::size_t start = b * span_len;
      const std::size_t half = span_len / 2;
      if (level + 1 == m) {
        angles[b] = 2.0 * std::atan2(amplitudes[start + 1], amplitudes[start]);
      } else {
        double n0 = 0.0;
        double n1 = 0.0;
        for (std::size_t t = 0; t < half; ++t) {
          n0 += amplitudes[start + t] * amplitudes[start + t];
          n1 += amplitudes[start + half + t] * amplitudes[start + half + t];
        }
        angles[b] = 2.0 * std::atan2(std::sqrt(n1), std::sqrt(n0));
      }
    }
    const std::vector<int> controls(reg.begin(), reg.begin() + static_cast<std::ptrdiff_t>(level));
    c.append(uniformly_controlled_rotation(n_qubits, GateKind::kRY, controls, reg[level], angles, stage));
  }
  return c;
}

/// Diagonal unitary diag(e^{i phases[x]}) on `reg` as a cascade of uniformly
/// controlled RZ gates plus one global phase.
inline Circuit diagonal_circuit(int n_qubits, const std::vector<int>& reg, std::span<const double> phases,
                                const std::string& stage = "diagonal") {
  const std::size_t m = reg.size();
  if (phases.size() != (std::size_t{1} << m)) throw InvalidArgument("phase count does not match register");
  Circuit c(n_qubits);
  std::vector<double> cur(phases.begin(), phases.end());
  for (std::size_t level = m; level-- > 0;) {
    // last remaining qubit reg[level] controlled by reg[0..level)
    const std::size_t branches = std::size_t{1} << level;
    std::vector<double> alpha(branches);
    std::vector<double> next(branches);
    for (std::size_t b = 0; b < branches; ++b) {
      alpha[b] = cur[2 * b + 1] - cur[2 * b];
      next[b] = 0.5 * (cur[2 * b] + cur[2 * b + 1]);
    }
    const std::vector<int> controls(reg.begin(), reg.begin() + static_cast<std::ptrdiff_t>(level));
    c.append(uniformly_controlled_rotation(n_qubits, GateKind::kRZ, controls, reg[level], alpha, stage));
    cur = std::move(next);
  }
  c.add({GateKind::kGlobalPhase, {-1, -1}, cur[0], stage});
  return c;
}

}  // namespace qnp

#endif  // QNP_CIRCUIT_HPP
