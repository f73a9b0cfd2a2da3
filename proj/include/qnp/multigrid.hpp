#ifndef QNP_MULTIGRID_HPP
#define QNP_MULTIGRID_HPP

// W-cycle geometric multigrid. Operator applications go through the
// sliding-window convolution (quantum or classical per backend), transfers
// through qtransfer, and coarse operators are rediscretized at 2h.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "qnp/errors.hpp"
#include "qnp/grid.hpp"
#include "qnp/qconv.hpp"
#include "qnp/qtransfer.hpp"
#include "qnp/stencils.hpp"

namespace qnp {

enum class Backend {
  kClassical,
  kQuantum,
  /// classical sweeps; the caller re-runs selected solves on the quantum backend
  kHybridSpotCheck,
};

inline std::string to_string(Backend b) {
  switch (b) {
    case Backend::kClassical:
      return "classical";
    case Backend::kQuantum:
      return "quantum";
    case Backend::kHybridSpotCheck:
      return "hybrid-spot-check";
  }
  return "?";
}

inline Backend parse_backend(const std::string& s) {
  if (s == "classical") return Backend::kClassical;
  if (s == "quantum") return Backend::kQuantum;
  if (s == "hybrid-spot-check" || s == "hybrid") return Backend::kHybridSpotCheck;
  throw InvalidArgument("unknown backend '" + s + "'");
}

struct SolverConfig {
  int pre_smooths = 2;   ///< eta
  int post_smooths = 2;  ///< phi
  int max_cycles = 20;
  double tolerance = 1e-8;  ///< on ||b - A x|| / ||b||
  int window = 4;           ///< K
  Backend backend = Backend::kClassical;
  double omega = 2.0 / 3.0;
  int coarse_iterations = 50;
  int max_levels = 3;
  /// a level is coarsened only while its smaller extent is at least this
  int min_coarsen_extent = 6;
  /// worker threads for window sweeps; 0 reads QNP_THREADS, else hardware
  int threads = 0;

  void validate() const {
    if (pre_smooths < 1 || post_smooths < 1) throw InvalidArgument("pre/post smoothing counts must be >= 1");
    if (window < 4) throw InvalidArgument("window K must be >= 4");
    if (!(omega > 0.0 && omega <= 1.0)) throw InvalidArgument("damping must lie in (0, 1]");
    if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
    if (max_cycles < 1) throw InvalidArgument("max_cycles must be >= 1");
    if (coarse_iterations < 0) throw InvalidArgument("coarse_iterations must be >= 0");
    if (max_levels < 1) throw InvalidArgument("max_levels must be >= 1");
  }

  TransferBackend transfer_backend() const {
    return backend == Backend::kQuantum ? TransferBackend::kQuantum : TransferBackend::kClassical;
  }
};

struct ConvergenceHistory {
  /// relative residual before the first cycle, then after each cycle
  std::vector<double> residuals;
  std::size_t quantum_calls = 0;
  std::size_t classical_fallback_calls = 0;
  int cycles = 0;
  bool converged = false;
};

/// Call counters filled by operator applications.
struct CallCounters {
  std::size_t quantum_calls = 0;
  std::size_t classical_fallback_calls = 0;
};

inline int worker_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("QNP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Window start positions along one axis: stride K-2, the last start pulled
/// back so the final window ends at the domain edge.
inline std::vector<int> window_starts(int extent, int window) {
  std::vector<int> starts;
  if (extent < window) return starts;
  const int stride = window - 2;
  for (int s = 0;; s += stride) {
    if (s + window >= extent) {
      starts.push_back(extent - window);
      break;
    }
    starts.push_back(s);
  }
  return starts;
}

/// Number of K x K windows a quantum sweep over an H x W field uses.
inline std::size_t window_count(int rows, int cols, int window) {
  return window_starts(rows, window).size() * window_starts(cols, window).size();
}

/// op applied to the field with its boundary rule. On the quantum backend the
/// interior is tiled by K x K windows through the convolution circuit; the
/// one-cell boundary ring (and everything, if the field is smaller than a
/// window) is computed classically from the ghost-padded field.
inline Field2D apply_operator_sliding_window(const Field2D& field, const OperatorSpec& op, const SolverConfig& config,
                                             CallCounters* counters = nullptr) {
  const int H = field.rows();
  const int W = field.cols();
  if (H < 3 || W < 3) throw InvalidArgument("operator application needs at least a 3x3 field");
  Field2D out = field.like();
  out.values = apply_kernel(field, op.kernel);
  if (config.backend != Backend::kQuantum) {
    if (counters) ++counters->classical_fallback_calls;
    return out;
  }
  const auto rs = window_starts(H, config.window);
  const auto cs = window_starts(W, config.window);
  if (rs.empty() || cs.empty() || op.kernel.is_zero()) {
    if (counters) ++counters->classical_fallback_calls;
    return out;
  }
  if (counters) ++counters->classical_fallback_calls;  // boundary ring

  const int K = config.window;
  const QuantumConvolver conv(op.kernel, K);
  const std::size_t n_windows = rs.size() * cs.size();
  std::vector<Array2D> results(n_windows, Array2D(K - 2, K - 2));
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t w = begin; w < end; ++w) {
      const int r0 = rs[w / cs.size()];
      const int c0 = cs[w % cs.size()];
      results[w] = conv.convolve(field.values.sub(r0, c0, K, K));
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::min<int>(worker_threads(config.threads), static_cast<int>(n_windows)));
  if (n_threads <= 1) {
    work(0, n_windows);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_windows + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
      const std::size_t b = t * chunk;
      const std::size_t e = std::min(n_windows, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  for (std::size_t w = 0; w < n_windows; ++w) {
    const int r0 = rs[w / cs.size()];
    const int c0 = cs[w % cs.size()];
    for (int i = 0; i < K - 2; ++i) {
      for (int j = 0; j < K - 2; ++j) out(r0 + 1 + i, c0 + 1 + j) = results[w](i, j);
    }
  }
  if (counters) counters->quantum_calls += n_windows;
  return out;
}

/// b - A x.
inline Field2D residual(const Field2D& x, const OperatorSpec& op, const Field2D& b, const SolverConfig& config,
                        CallCounters* counters = nullptr) {
  if (!x.values.same_shape(b.values)) throw ShapeMismatch("solution and right-hand side shapes differ");
  Field2D r = b;
  const Field2D ax = apply_operator_sliding_window(x, op, config, counters);
  axpy(r.values, -1.0, ax.values);
  return r;
}

/// Damped Jacobi: x <- x + omega (b - A x) / a_center, `iterations` times.
inline Field2D smooth(Field2D x, const OperatorSpec& op, const Field2D& b, int iterations, double omega,
                      const SolverConfig& config, CallCounters* counters = nullptr) {
  const double centre = op.kernel.at(0, 0);
  if (centre == 0.0) throw DegenerateOperator("Jacobi smoother needs a nonzero centre coefficient");
  const double s = omega / centre;
  for (int it = 0; it < iterations; ++it) {
    const Field2D r = residual(x, op, b, config, counters);
    axpy(x.values, s, r.values);
  }
  return x;
}

struct GridLevel {
  int rows;
  int cols;
  double h;
  OperatorSpec op;
};

/// Level stack from fine (index 0) to coarse; each level halves the extents
/// (rounding up) and doubles the spacing.
class GridHierarchy {
 public:
  GridHierarchy(int rows, int cols, double h, const OperatorFactory& factory, const SolverConfig& config) {
    if (rows < 3 || cols < 3) throw InvalidArgument("finest grid must be at least 3x3");
    levels_.push_back({rows, cols, h, factory(h)});
    while (static_cast<int>(levels_.size()) < config.max_levels) {
      const auto& last = levels_.back();
      if (std::min(last.rows, last.cols) < config.min_coarsen_extent) break;
      const int r = coarse_extent(last.rows);
      const int c = coarse_extent(last.cols);
      if (std::min(r, c) < 3) break;
      const double hc = 2.0 * last.h;
      levels_.push_back({r, c, hc, factory(hc)});
    }
  }

  std::size_t depth() const noexcept { return levels_.size(); }
  const GridLevel& level(std::size_t l) const { return levels_.at(l); }
  const std::vector<GridLevel>& levels() const noexcept { return levels_; }

 private:
  std::vector<GridLevel> levels_;
};

/// One W-cycle at `level`: pre-smooth, two recursive coarse corrections (or
/// coarse_iterations sweeps on the coarsest level), post-smooth.
inline Field2D w_cycle(std::size_t level, Field2D x, const Field2D& b, const GridHierarchy& hierarchy,
                       const SolverConfig& config, CallCounters* counters = nullptr) {
  if (level >= hierarchy.depth()) throw InvalidArgument("level outside the hierarchy");
  const GridLevel& lv = hierarchy.level(level);
  if (x.rows() != lv.rows || x.cols() != lv.cols) throw ShapeMismatch("field does not match its level");
  x = smooth(std::move(x), lv.op, b, config.pre_smooths, config.omega, config, counters);
  if (level + 1 == hierarchy.depth()) {
    x = smooth(std::move(x), lv.op, b, config.coarse_iterations, config.omega, config, counters);
  } else {
    const auto tb = config.transfer_backend();
    const Field2D r = residual(x, lv.op, b, config, counters);
    const Field2D rc = restrict_field(r, tb);
    Field2D e = rc.like();
    for (int pass = 0; pass < 2; ++pass) e = w_cycle(level + 1, std::move(e), rc, hierarchy, config, counters);
    const Field2D ef = prolong_field(e, tb, lv.rows, lv.cols);
    axpy(x.values, 1.0, ef.values);
  }
  return smooth(std::move(x), lv.op, b, config.post_smooths, config.omega, config, counters);
}

struct SolveResult {
  Field2D solution;
  ConvergenceHistory history;
};

/// W-cycles from `initial` (zero when absent) until the relative residual
/// drops to the tolerance or max_cycles is reached.
inline SolveResult solve(const OperatorFactory& factory, const Field2D& b, const SolverConfig& config,
                         const Field2D* initial = nullptr) {
  config.validate();
  const GridHierarchy hierarchy(b.rows(), b.cols(), b.h, factory, config);
  Field2D x = initial ? *initial : b.like();
  if (!x.values.same_shape(b.values)) throw ShapeMismatch("initial guess shape differs from right-hand side");

  ConvergenceHistory hist;
  CallCounters counters;
  const double bnorm = l2_norm(b.values);
  if (bnorm == 0.0 && !initial) {
    hist.residuals.push_back(0.0);
    hist.converged = true;
    return {x, hist};
  }
  const double scale = bnorm > 0.0 ? bnorm : 1.0;
  const OperatorSpec& fine = hierarchy.level(0).op;
  hist.residuals.push_back(l2_norm(residual(x, fine, b, config, &counters).values) / scale);
  while (hist.cycles < config.max_cycles && hist.residuals.back() > config.tolerance) {
    x = w_cycle(0, std::move(x), b, hierarchy, config, &counters);
    ++hist.cycles;
    hist.residuals.push_back(l2_norm(residual(x, fine, b, config, &counters).values) / scale);
    if (!std::isfinite(hist.residuals.back())) break;
  }
  hist.converged = hist.residuals.back() <= config.tolerance;
  hist.quantum_calls = counters.quantum_calls;
  hist.classical_fallback_calls = counters.classical_fallback_calls;
  return {x, hist};
}

}  // namespace qnp

#endif  // QNP_MULTIGRID_HPP
