#ifndef QNP_QTRANSFER_HPP
#define QNP_QTRANSFER_HPP

// Two-qubit transfer circuits between multigrid levels. Restriction reads the
// |00> amplitude after H (x) H (proportional to the 2x2 block sum); prolongation
// prepares the uniform state from |00>.

#include <array>
#include <cmath>
#include <vector>

#include "qnp/errors.hpp"
#include "qnp/grid.hpp"
#include "qnp/statevector.hpp"

namespace qnp {

enum class TransferBackend { kClassical, kQuantum };

struct RestrictionResult {
  double value = 0.0;
  double success_amplitude = 0.0;  ///< |a_00|
};

struct ProlongationResult {
  Array2D value{2, 2};
  double success_amplitude = 1.0;
};

inline constexpr double kDefaultRestrictionWeight = 0.25;

/// weight * (sum of the 2x2 block), computed from the |00> amplitude.
inline RestrictionResult quantum_restrict_block(const Array2D& block, double weight = kDefaultRestrictionWeight) {
  if (block.rows() != 2 || block.cols() != 2) throw ShapeMismatch("restriction block must be 2x2");
  const auto& v = block.storage();
  if (v[0] == 0.0 && v[1] == 0.0 && v[2] == 0.0 && v[3] == 0.0) return {0.0, 0.0};
  StateVector s = amplitude_encode(v, 2);
  s.hadamard(0).hadamard(1);
  const double a00 = s.amplitude(0).real();
  return {weight * 2.0 * s.norm_factor() * a00, std::abs(a00)};
}

/// Uniform 2x2 block holding `value` in every cell.
inline ProlongationResult quantum_prolong_scalar(double value) {
  StateVector s(2);
  s.hadamard(0).hadamard(1);
  // the uniform state has amplitudes 1/2, so a classical scale of 2 value decodes to value
  const double scale = 2.0 * value;
  ProlongationResult r;
  for (int k = 0; k < 4; ++k) r.value.storage()[static_cast<std::size_t>(k)] = scale * s.amplitude(static_cast<std::size_t>(k)).real();
  r.success_amplitude = 1.0;
  return r;
}

/// Coarse extent for a fine extent: ceil(n / 2).
inline constexpr int coarse_extent(int fine) { return (fine + 1) / 2; }

/// 1/4-average restriction to ceil(H/2) x ceil(W/2) at spacing 2h. A trailing
/// odd row or column averages the cells that exist.
inline Field2D restrict_field(const Field2D& fine, TransferBackend backend = TransferBackend::kClassical) {
  const int H = fine.rows();
  const int W = fine.cols();
  Field2D coarse(coarse_extent(H), coarse_extent(W), 2.0 * fine.h, fine.bc);
  for (int I = 0; I < coarse.rows(); ++I) {
    for (int J = 0; J < coarse.cols(); ++J) {
      const int i0 = 2 * I;
      const int j0 = 2 * J;
      const bool full = i0 + 1 < H && j0 + 1 < W;
      if (full && backend == TransferBackend::kQuantum) {
        coarse(I, J) = quantum_restrict_block(fine.values.sub(i0, j0, 2, 2)).value;
        continue;
      }
      double acc = 0.0;
      int n = 0;
      for (int i = i0; i < std::min(i0 + 2, H); ++i) {
        for (int j = j0; j < std::min(j0 + 2, W); ++j) {
          acc += fine(i, j);
          ++n;
        }
      }
      coarse(I, J) = acc / n;
    }
  }
  return coarse;
}

/// Replication of each coarse value into its 2x2 fine block at spacing h/2.
/// `rows`/`cols` crop the result when the fine level had odd extents
/// (negative means the full 2H x 2W).
inline Field2D prolong_field(const Field2D& coarse, TransferBackend backend = TransferBackend::kClassical,
                             int rows = -1, int cols = -1) {
  const int H = rows < 0 ? 2 * coarse.rows() : rows;
  const int W = cols < 0 ? 2 * coarse.cols() : cols;
  if (coarse_extent(H) != coarse.rows() || coarse_extent(W) != coarse.cols()) {
    throw ShapeMismatch("fine shape does not coarsen to the coarse shape");
  }
  Field2D fine(H, W, 0.5 * coarse.h, coarse.bc);
  for (int I = 0; I < coarse.rows(); ++I) {
    for (int J = 0; J < coarse.cols(); ++J) {
      Array2D blk(2, 2, coarse(I, J));
      if (backend == TransferBackend::kQuantum) blk = quantum_prolong_scalar(coarse(I, J)).value;
      for (int di = 0; di < 2; ++di) {
        for (int dj = 0; dj < 2; ++dj) {
          const int i = 2 * I + di;
          const int j = 2 * J + dj;
          if (i < H && j < W) fine(i, j) = blk(di, dj);
        }
      }
    }
  }
  return fine;
}

}  // namespace qnp

#endif  // QNP_QTRANSFER_HPP
