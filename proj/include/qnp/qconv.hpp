#ifndef QNP_QCONV_HPP
#define QNP_QCONV_HPP

// Quantum convolution engine: a 3x3 kernel as a linear combination of nine
// translation unitaries, block-encoded with PREPARE / SELECT / UNPREPARE where
// SELECT runs as controlled phases in the QFT domain.
//
// Register layout for a K x K window, m = ceil(log2 K):
//   qubits 0..3          ancilla (LCU selection)
//   qubits 4..4+m-1      row register
//   qubits 4+m..4+2m-1   column register
//
// Ancilla slot of the term at offset (dr, dc) is 4 (dr + 1) + (dc + 1): the
// first two ancilla qubits hold the row offset index, the last two the column
// offset index. SELECT therefore factorises into two-qubit controlled phases
// between one ancilla qubit and one data qubit.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "qnp/circuit.hpp"
#include "qnp/errors.hpp"
#include "qnp/grid.hpp"
#include "qnp/statevector.hpp"

namespace qnp {

inline constexpr int kAncillaQubits = 4;
inline constexpr std::size_t kAncillaSlots = 16;

inline constexpr int lcu_slot(int row_offset, int col_offset) { return 4 * (row_offset + 1) + (col_offset + 1); }

struct LcuTerm {
  double coefficient;
  int row_offset;
  int col_offset;
  int slot;  ///< ancilla basis state selecting this term
};

struct LcuDecomposition {
  std::vector<LcuTerm> terms;
  double lambda = 0.0;
  /// sqrt(|c| / lambda) at each term's slot, 0 in unused slots.
  std::array<double, kAncillaSlots> prepare_amplitudes{};
};

/// One term per nonzero kernel entry, lambda = sum |c_k|.
inline LcuDecomposition decompose_kernel(const Kernel3x3& kernel) {
  if (kernel.is_zero()) throw DegenerateOperator("kernel has no nonzero coefficient");
  LcuDecomposition d;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const double c = kernel.at(dr, dc);
      if (c == 0.0) continue;
      d.terms.push_back({c, dr, dc, lcu_slot(dr, dc)});
      d.lambda += std::abs(c);
    }
  }
  for (const auto& t : d.terms) {
    d.prepare_amplitudes[static_cast<std::size_t>(t.slot)] = std::sqrt(std::abs(t.coefficient) / d.lambda);
  }
  return d;
}

/// Diagonal phases one LCU term applies in the Fourier basis.
struct PhaseProgram {
  int slot;
  int row_offset;
  int col_offset;
  std::vector<Complex> row_phases;  ///< e^{i 2 pi j d_r / 2^{m_r}}, j = 0..2^{m_r}-1
  std::vector<Complex> col_phases;
  bool negate;  ///< extra pi phase for a negative coefficient
};

struct ShiftPhaseSchedule {
  int row_qubits = 0;
  int col_qubits = 0;
  std::vector<PhaseProgram> programs;

  /// Total phase the schedule puts on ancilla slot `slot` at frequencies (jr, jc);
  /// unused slots get 1.
  Complex phase(int slot, std::size_t jr, std::size_t jc) const {
    for (const auto& p : programs) {
      if (p.slot == slot) return (p.negate ? -1.0 : 1.0) * p.row_phases[jr] * p.col_phases[jc];
    }
    return 1.0;
  }
};

inline std::vector<Complex> shift_phases(int offset, int register_qubits) {
  const std::size_t n = std::size_t{1} << register_qubits;
  std::vector<Complex> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    // (j * offset) mod n keeps the angle exact for large registers
    const long long jd = static_cast<long long>(j) * offset;
    const long long nn = static_cast<long long>(n);
    const long long r = ((jd % nn) + nn) % nn;
    out[j] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n));
  }
  return out;
}

inline ShiftPhaseSchedule shift_phase_schedule(const LcuDecomposition& decomp, int row_register_qubits,
                                               int col_register_qubits) {
  if (row_register_qubits < 1 || col_register_qubits < 1) throw InvalidArgument("register sizes must be at least 1");
  ShiftPhaseSchedule s{row_register_qubits, col_register_qubits, {}};
  for (const auto& t : decomp.terms) {
    s.programs.push_back({t.slot, t.row_offset, t.col_offset, shift_phases(t.row_offset, row_register_qubits),
                          shift_phases(t.col_offset, col_register_qubits), t.coefficient < 0.0});
  }
  return s;
}

inline int register_qubits_for(int window) {
  int m = 0;
  while ((1 << m) < window) ++m;
  return m;
}

/// Gate-level SELECT for the factorised slot layout. Row-offset index
/// r = 2 a0 + a1 gives the phase 2 pi j (r - 1) / 2^m on row frequency j,
/// split into one controlled phase per (ancilla bit, data bit) pair plus a
/// single-qubit phase per data bit for the -1 shift. Same for columns.
inline Circuit select_shift_circuit(int m) {
  const int n = kAncillaQubits + 2 * m;
  Circuit c(n);
  const double two_pi = 2.0 * std::numbers::pi;
  const double dim = static_cast<double>(1 << m);
  for (int axis = 0; axis < 2; ++axis) {
    const int a_hi = axis == 0 ? 0 : 2;
    const int a_lo = a_hi + 1;
    const int first = kAncillaQubits + axis * m;
    for (int p = 0; p < m; ++p) {
      const int q = first + p;
      const double w = static_cast<double>(1 << (m - 1 - p));
      c.add({GateKind::kCP, {a_hi, q}, two_pi * 2.0 * w / dim, "select"});
      c.add({GateKind::kCP, {a_lo, q}, two_pi * w / dim, "select"});
      c.add({GateKind::kP, {q, -1}, -two_pi * w / dim, "select"});
    }
  }
  return c;
}

/// Phases (0 or pi) restoring the sign of negative coefficients, per ancilla slot.
inline std::array<double, kAncillaSlots> sign_phases(const LcuDecomposition& decomp) {
  std::array<double, kAncillaSlots> ph{};
  for (const auto& t : decomp.terms) {
    if (t.coefficient < 0.0) ph[static_cast<std::size_t>(t.slot)] = std::numbers::pi;
  }
  return ph;
}

/// The whole K x K block-encoding circuit in elementary gates. Data loading
/// (amplitude encoding of the window) is the circuit's input and is not part
/// of the gate list.
inline Circuit convolution_circuit(const LcuDecomposition& decomp, int window) {
  const int m = register_qubits_for(window);
  const int n = kAncillaQubits + 2 * m;
  const std::vector<int> anc{0, 1, 2, 3};
  std::vector<int> rows;
  std::vector<int> cols;
  for (int p = 0; p < m; ++p) {
    rows.push_back(kAncillaQubits + p);
    cols.push_back(kAncillaQubits + m + p);
  }
  const Circuit prepare = state_preparation_circuit(n, anc, decomp.prepare_amplitudes, "prepare");
  Circuit c(n);
  c.append(prepare);
  c.append(qft_circuit(n, rows, false, "qft"));
  c.append(qft_circuit(n, cols, false, "qft"));
  c.append(select_shift_circuit(m));
  const auto signs = sign_phases(decomp);
  c.append(diagonal_circuit(n, anc, signs, "select_sign"));
  c.append(qft_circuit(n, rows, true, "inverse_qft"));
  c.append(qft_circuit(n, cols, true, "inverse_qft"));
  Circuit unprepare = prepare.inverse();
  unprepare.relabel_stage("unprepare");
  c.append(unprepare);
  return c;
}

struct CircuitStats {
  int window = 0;
  int n_qubits = 0;
  std::size_t gate_count = 0;
  std::size_t depth = 0;
  std::map<std::string, std::size_t> gates_by_stage;
  std::string counting_convention;
};

inline const char* kCountingConvention =
    "one- and two-qubit gates {H, RY, RZ, P, CP, CNOT, SWAP}; PREPARE/UNPREPARE as Gray-code uniformly "
    "controlled RY trees, QFT as H + controlled-phase ladder with final swaps, SELECT shifts as two-qubit "
    "controlled phases, coefficient signs as a Gray-code uniformly controlled RZ cascade; data loading and "
    "global phases not counted; depth by as-soon-as-possible layering";

/// Resource count of the K x K circuit. The structure (and so the count) does
/// not depend on the kernel's values.
inline CircuitStats circuit_stats(int window) {
  if (window < 4) throw InvalidArgument("window size must be at least 4");
  // a kernel with all nine entries nonzero and mixed signs exercises every stage
  const Kernel3x3 generic{{1.0, -1.0, 1.0}, {-1.0, 4.0, -1.0}, {1.0, -1.0, 1.0}};
  const Circuit c = convolution_circuit(decompose_kernel(generic), window);
  return {window, c.n_qubits(), c.gate_count(), c.depth(), c.gate_count_by_stage(), kCountingConvention};
}

/// Precompiled dense simulation of the block encoding for one kernel and one
/// window size; reusable across windows.
class QuantumConvolver {
 public:
  QuantumConvolver(const Kernel3x3& kernel, int window)
      : window_(window), decomp_(decompose_kernel(kernel)) {
    if (window < 4) throw InvalidArgument("quantum convolution needs K >= 4, got " + std::to_string(window));
    m_ = register_qubits_for(window);
    n_ = kAncillaQubits + 2 * m_;
    anc_ = {"ancilla", {0, 1, 2, 3}};
    rows_.label = "row";
    cols_.label = "col";
    for (int p = 0; p < m_; ++p) {
      rows_.qubits.push_back(kAncillaQubits + p);
      cols_.qubits.push_back(kAncillaQubits + m_ + p);
    }
    prepare_ = householder_prepare(decomp_.prepare_amplitudes);
    unprepare_ = adjoint(prepare_);
    select_ = select_shift_circuit(m_);
    for (const auto& t : decomp_.terms) {
      if (t.coefficient < 0.0) negative_slots_.push_back(t.slot);
    }
  }

  int window() const noexcept { return window_; }
  int n_qubits() const noexcept { return n_; }
  const LcuDecomposition& decomposition() const noexcept { return decomp_; }
  const QubitRegister& ancilla() const noexcept { return anc_; }

  /// Loads the window zero-padded to 2^m x 2^m into the data registers.
  StateVector encode(const Array2D& block) const {
    const std::size_t dim = std::size_t{1} << m_;
    std::vector<double> padded(dim * dim, 0.0);
    for (int i = 0; i < window_; ++i) {
      for (int j = 0; j < window_; ++j) padded[static_cast<std::size_t>(i) * dim + static_cast<std::size_t>(j)] = block(i, j);
    }
    return amplitude_encode(padded, n_);
  }

  /// PREPARE, QFT, SELECT, inverse QFT, UNPREPARE on an encoded window.
  void run_circuit(StateVector& s) const {
    s.register_unitary(anc_, prepare_);
    s.qft(rows_, false);
    s.qft(cols_, false);
    execute(s, select_);
    for (int slot : negative_slots_) apply_slot_sign(s, slot);
    s.qft(rows_, true);
    s.qft(cols_, true);
    s.register_unitary(anc_, unprepare_);
  }

  /// (K-2) x (K-2) valid convolution of the window.
  Array2D convolve(const Array2D& block) const {
    if (block.rows() != window_ || block.cols() != window_) {
      throw ShapeMismatch("window must be " + std::to_string(window_) + "x" + std::to_string(window_));
    }
    Array2D out(window_ - 2, window_ - 2, 0.0);
    if (std::all_of(block.storage().begin(), block.storage().end(), [](double v) { return v == 0.0; })) return out;

    StateVector s = encode(block);
    run_circuit(s);
    ProjectionResult proj{StateVector(0), 0.0};
    try {
      proj = project_ancilla_zero(s, anc_);
    } catch (const PostSelectionFailure&) {
      // the block-encoded image is numerically null: A x = 0 on this window
      return out;
    }
    // A x = lambda * ||x|| * success * psi, and norm_factor already holds ||x|| * success
    const double scale = decomp_.lambda * proj.state.norm_factor();
    const std::size_t dim = std::size_t{1} << m_;
    const auto amps = proj.state.amplitudes();
    for (int i = 0; i < out.rows(); ++i) {
      for (int j = 0; j < out.cols(); ++j) {
        out(i, j) = scale * amps[static_cast<std::size_t>(i + 1) * dim + static_cast<std::size_t>(j + 1)].real();
      }
    }
    return out;
  }

 private:
  /// Real orthogonal (Householder) matrix whose first column is `target`.
  static std::vector<Complex> householder_prepare(const std::array<double, kAncillaSlots>& target) {
    const std::size_t n = kAncillaSlots;
    std::vector<Complex> m(n * n, 0.0);
    std::array<double, kAncillaSlots> v{};
    double vv = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      v[k] = (k == 0 ? 1.0 : 0.0) - target[k];
      vv += v[k] * v[k];
    }
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        const double id = r == c ? 1.0 : 0.0;
        m[r * n + c] = vv > 1e-300 ? id - 2.0 * v[r] * v[c] / vv : id;
      }
    }
    return m;
  }

  static std::vector<Complex> adjoint(const std::vector<Complex>& m) {
    const std::size_t n = kAncillaSlots;
    std::vector<Complex> a(n * n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) a[c * n + r] = std::conj(m[r * n + c]);
    }
    return a;
  }

  /// pi phase on ancilla basis state `slot` (multi-controlled phase; an X pair
  /// turns the all-zero slot into a controllable one).
  static void apply_slot_sign(StateVector& s, int slot) {
    const bool all_zero = slot == 0;
    if (all_zero) s.pauli_x(3);
    const int pattern = all_zero ? 1 : slot;
    int target = 3;
    while (!((pattern >> (3 - target)) & 1)) --target;
    std::vector<Control> controls;
    for (int q = 0; q < kAncillaQubits; ++q) {
      if (q != target) controls.push_back({q, ((pattern >> (3 - q)) & 1) != 0});
    }
    s.controlled_phase(controls, target, std::numbers::pi);
    if (all_zero) s.pauli_x(3);
  }

  int window_;
  LcuDecomposition decomp_;
  int m_ = 0;
  int n_ = 0;
  QubitRegister anc_;
  QubitRegister rows_;
  QubitRegister cols_;
  std::vector<Complex> prepare_;
  std::vector<Complex> unprepare_;
  Circuit select_{0};
  std::vector<int> negative_slots_;
};

/// Valid convolution of a K x K window through the simulated circuit.
inline Array2D quantum_convolve_block(const Array2D& block, const Kernel3x3& kernel) {
  if (block.rows() != block.cols()) throw ShapeMismatch("quantum window must be square");
  if (block.rows() < 4) throw InvalidArgument("quantum convolution needs K >= 4, got " + std::to_string(block.rows()));
  if (std::all_of(block.storage().begin(), block.storage().end(), [](double v) { return v == 0.0; })) {
    return Array2D(block.rows() - 2, block.cols() - 2, 0.0);
  }
  return QuantumConvolver(kernel, block.rows()).convolve(block);
}

/// Circular (wrap-around) convolution over the whole array; what the QFT
/// phases implement before the interior is extracted.
inline Array2D circular_convolve(const Array2D& a, const Kernel3x3& kernel) {
  const int H = a.rows();
  const int W = a.cols();
  Array2D out(H, W, 0.0);
  for (int i = 0; i < H; ++i) {
    for (int j = 0; j < W; ++j) {
      double acc = 0.0;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) acc += kernel.at(dr, dc) * a(((i - dr) % H + H) % H, ((j - dc) % W + W) % W);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

}  // namespace qnp

#endif  // QNP_QCONV_HPP
