#ifndef QNP_STATEVECTOR_HPP
#define QNP_STATEVECTOR_HPP

// Dense state-vector simulator with exactly the gate set the convolution,
// restriction and prolongation circuits use.
//
// Qubit ordering is big-endian: qubit 0 is the most significant bit of the
// basis index, so for n qubits qubit q lives at bit (n - 1 - q).

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qnp/errors.hpp"

namespace qnp {

using Complex = std::complex<double>;

/// Named, ordered group of qubits; the first listed qubit is the register's
/// most significant bit.
struct QubitRegister {
  std::string label;
  std::vector<int> qubits;

  std::size_t size() const noexcept { return qubits.size(); }
  std::size_t dim() const noexcept { return std::size_t{1} << qubits.size(); }
};

/// One control of a controlled gate: fires when `qubit` reads `value`.
struct Control {
  int qubit;
  bool value = true;
};

class StateVector {
 public:
  /// |0...0> on `n_qubits` qubits.
  explicit StateVector(int n_qubits) : n_qubits_(n_qubits) {
    if (n_qubits < 0 || n_qubits > 30) throw QubitIndexError("qubit count out of range");
    amps_.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
    amps_[0] = 1.0;
  }

  /// Adopts already normalized amplitudes. `norm_factor` is the classical scale
  /// such that norm_factor * amplitudes is the represented vector.
  static StateVector from_amplitudes(std::vector<Complex> amps, double norm_factor = 1.0) {
    const std::size_t dim = amps.size();
    if (dim == 0 || (dim & (dim - 1)) != 0) throw CapacityError("amplitude count is not a power of two");
    int n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    double sq = 0.0;
    for (const auto& a : amps) sq += std::norm(a);
    if (std::abs(std::sqrt(sq) - 1.0) > 1e-10) throw InvalidArgument("amplitudes are not normalized");
    if (!(norm_factor >= 0.0)) throw InvalidArgument("norm factor must be nonnegative");
    StateVector s(0);
    s.n_qubits_ = n;
    s.amps_ = std::move(amps);
    s.norm_factor_ = norm_factor;
    return s;
  }

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t dim() const noexcept { return amps_.size(); }
  double norm_factor() const noexcept { return norm_factor_; }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  Complex amplitude(std::size_t index) const { return amps_.at(index); }

  /// Euclidean norm of the amplitude vector (1 up to rounding).
  double amplitude_norm() const {
    double sq = 0.0;
    for (const auto& a : amps_) sq += std::norm(a);
    return std::sqrt(sq);
  }

  std::size_t bit_of(int qubit) const {
    check_qubit(qubit);
    return std::size_t{1} << (n_qubits_ - 1 - qubit);
  }

  // ---- gates (in place) ----

  StateVector& hadamard(int qubit) {
    const std::size_t bit = bit_of(qubit);
    const double s = std::numbers::sqrt2 / 2.0;
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (i & bit) continue;
      const Complex a0 = amps_[i];
      const Complex a1 = amps_[i | bit];
      amps_[i] = s * (a0 + a1);
      amps_[i | bit] = s * (a0 - a1);
    }
    return *this;
  }

  StateVector& pauli_x(int qubit) {
    const std::size_t bit = bit_of(qubit);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if (!(i & bit)) std::swap(amps_[i], amps_[i | bit]);
    }
    return *this;
  }

  /// Multiplies by e^{i angle} every basis component whose controls all match
  /// and whose target bit is 1. No controls gives a plain phase gate.
  StateVector& controlled_phase(std::span<const Control> controls, int target, double angle) {
    const std::size_t tbit = bit_of(target);
    std::size_t mask = 0;
    std::size_t want = 0;
    for (const auto& c : controls) {
      const std::size_t b = bit_of(c.qubit);
      if (c.qubit == target || (mask & b)) throw QubitIndexError("controls and target must be distinct");
      mask |= b;
      if (c.value) want |= b;
    }
    const Complex phase = std::polar(1.0, angle);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      if ((i & tbit) && (i & mask) == want) amps_[i] *= phase;
    }
    return *this;
  }

  /// Applies a dense 2^m x 2^m matrix (row-major) to the register's subspace.
  /// The caller is responsible for the matrix being unitary.
  StateVector& register_unitary(const QubitRegister& reg, std::span<const Complex> matrix) {
    const std::size_t m_dim = reg.dim();
    if (reg.qubits.empty()) throw QubitIndexError("empty register");
    if (matrix.size() != m_dim * m_dim) throw InvalidArgument("register matrix has the wrong size");
    const auto offsets = register_offsets(reg);
    std::size_t reg_mask = 0;
    for (auto o : offsets) reg_mask |= o;

    std::vector<Complex> in(m_dim);
    for (std::size_t base = 0; base < amps_.size(); ++base) {
      if (base & reg_mask) continue;
      for (std::size_t r = 0; r < m_dim; ++r) in[r] = amps_[base | offsets[r]];
      for (std::size_t r = 0; r < m_dim; ++r) {
        Complex acc{0.0, 0.0};
        const Complex* row = matrix.data() + r * m_dim;
        for (std::size_t c = 0; c < m_dim; ++c) acc += row[c] * in[c];
        amps_[base | offsets[r]] = acc;
      }
    }
    return *this;
  }

  /// Exact discrete Fourier transform over the register,
  /// |j> -> 2^{-m/2} sum_k e^{+i 2 pi j k / 2^m} |k>; `inverse` applies the adjoint.
  StateVector& qft(const QubitRegister& reg, bool inverse = false) {
    return register_unitary(reg, dft_matrix(reg.size(), inverse));
  }

  static std::vector<Complex> dft_matrix(std::size_t m, bool inverse) {
    const std::size_t dim = std::size_t{1} << m;
    const double sign = inverse ? -1.0 : 1.0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    std::vector<Complex> f(dim * dim);
    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t k = 0; k < dim; ++k) {
        // reduce jk mod dim first so large products keep full phase precision
        const double frac = static_cast<double>((j * k) % dim) / static_cast<double>(dim);
        f[k * dim + j] = std::polar(scale, sign * 2.0 * std::numbers::pi * frac);
      }
    }
    return f;
  }

  /// Basis-index offset of each register value (register value r -> OR-able bits).
  std::vector<std::size_t> register_offsets(const QubitRegister& reg) const {
    check_register(reg);
    const std::size_t m = reg.size();
    std::vector<std::size_t> offsets(std::size_t{1} << m, 0);
    for (std::size_t r = 0; r < offsets.size(); ++r) {
      std::size_t off = 0;
      for (std::size_t q = 0; q < m; ++q) {
        if (r & (std::size_t{1} << (m - 1 - q))) off |= bit_of(reg.qubits[q]);
      }
      offsets[r] = off;
    }
    return offsets;
  }

  void check_register(const QubitRegister& reg) const {
    std::size_t seen = 0;
    for (int q : reg.qubits) {
      const std::size_t b = bit_of(q);
      if (seen & b) throw QubitIndexError("register '" + reg.label + "' repeats a qubit");
      seen |= b;
    }
  }

 private:
  void check_qubit(int qubit) const {
    if (qubit < 0 || qubit >= n_qubits_) {
      throw QubitIndexError("qubit " + std::to_string(qubit) + " outside [0, " + std::to_string(n_qubits_) + ")");
    }
  }

  int n_qubits_ = 0;
  std::vector<Complex> amps_;
  double norm_factor_ = 1.0;
};

/// Normalized values zero-padded to 2^n_qubits; the stripped norm is kept in
/// norm_factor.
inline StateVector amplitude_encode(std::span<const double> values, int n_qubits) {
  if (n_qubits < 0 || n_qubits > 30) throw QubitIndexError("qubit count out of range");
  const std::size_t dim = std::size_t{1} << n_qubits;
  if (values.size() > dim) {
    throw CapacityError(std::to_string(values.size()) + " values do not fit " + std::to_string(n_qubits) + " qubits");
  }
  double sq = 0.0;
  for (double v : values) sq += v * v;
  const double norm = std::sqrt(sq);
  if (norm == 0.0) throw EncodingDegenerate();
  std::vector<Complex> amps(dim, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < values.size(); ++i) amps[i] = values[i] / norm;
  // renormalize once more so the invariant holds to rounding for extreme inputs
  double check = 0.0;
  for (const auto& a : amps) check += std::norm(a);
  if (std::abs(check - 1.0) > 1e-14) {
    const double fix = 1.0 / std::sqrt(check);
    for (auto& a : amps) a *= fix;
  }
  return StateVector::from_amplitudes(std::move(amps), norm);
}

inline StateVector apply_hadamard(StateVector state, int qubit) {
  state.hadamard(qubit);
  return state;
}

inline StateVector apply_pauli_x(StateVector state, int qubit) {
  state.pauli_x(qubit);
  return state;
}

inline StateVector apply_controlled_phase(StateVector state, std::span<const Control> controls, int target,
                                          double angle) {
  state.controlled_phase(controls, target, angle);
  return state;
}

inline StateVector apply_qft(StateVector state, const QubitRegister& reg, bool inverse = false) {
  state.qft(reg, inverse);
  return state;
}

struct ProjectionResult {
  /// Renormalized state on the non-ancilla qubits (original order kept). Its
  /// norm_factor is the input norm_factor times success_amplitude.
  StateVector state;
  double success_amplitude;
};

/// Post-selects every ancilla qubit on |0>.
inline ProjectionResult project_ancilla_zero(const StateVector& state, const QubitRegister& ancilla) {
  state.check_register(ancilla);
  const int n = state.n_qubits();
  std::size_t anc_mask = 0;
  for (int q : ancilla.qubits) anc_mask |= state.bit_of(q);

  std::vector<int> kept;
  for (int q = 0; q < n; ++q) {
    if (!(anc_mask & state.bit_of(q))) kept.push_back(q);
  }
  const int n_kept = static_cast<int>(kept.size());
  std::vector<Complex> out(std::size_t{1} << n_kept);
  double sq = 0.0;
  for (std::size_t r = 0; r < out.size(); ++r) {
    std::size_t idx = 0;
    for (int k = 0; k < n_kept; ++k) {
      if (r & (std::size_t{1} << (n_kept - 1 - k))) idx |= state.bit_of(kept[k]);
    }
    out[r] = state.amplitudes()[idx];
    sq += std::norm(out[r]);
  }
  const double success = std::sqrt(sq);
  if (success < 1e-14) throw PostSelectionFailure(success);
  for (auto& a : out) a /= success;
  return {StateVector::from_amplitudes(std::move(out), state.norm_factor() * success), success};
}

}  // namespace qnp

#endif  // QNP_STATEVECTOR_HPP
