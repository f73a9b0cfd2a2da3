#ifndef QNP_PDE_SUITE_HPP
#define QNP_PDE_SUITE_HPP

// The benchmark problems: grids, sources, boundary rules, reference oracles
// and error metrics. Index conventions: i is the row (y), j the column (x),
// cell centres at ((j + 0.5) h, (i + 0.5) h).

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qnp/errors.hpp"
#include "qnp/grid.hpp"
#include "qnp/multigrid.hpp"
#include "qnp/oracle.hpp"
#include "qnp/stencils.hpp"

namespace qnp {

/// One row of a case's time/cycle series.
using MetricRow = std::map<std::string, double>;

struct CaseReport {
  std::string name;
  int rows = 0;
  int cols = 0;
  double h = 1.0;
  std::map<std::string, double> parameters;
  std::map<std::string, double> metrics;
  std::vector<MetricRow> series;
  /// named snapshots written by the CLI
  std::vector<std::pair<std::string, Field2D>> fields;
  bool failed = false;
  std::string failure;

  bool all_metrics_finite() const {
    return std::all_of(metrics.begin(), metrics.end(), [](const auto& kv) { return std::isfinite(kv.second); });
  }
};

/// amplitude * exp(-((i - ci)^2 + (j - cj)^2) / width), in index units.
inline Field2D gaussian_source(int rows, int cols, double amplitude, double centre_row, double centre_col,
                               double width, double h = 1.0, BoundarySpec bc = {}) {
  if (!(width > 0.0)) throw InvalidArgument("source width must be positive");
  Field2D f(rows, cols, h, bc);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double di = i - centre_row;
      const double dj = j - centre_col;
      f(i, j) = amplitude * std::exp(-(di * di + dj * dj) / width);
    }
  }
  return f;
}

/// Pointwise |a - ref| / |ref|, with cells where ref vanishes reported as 0.
inline Array2D pointwise_relative_error(const Array2D& a, const Array2D& ref) {
  Array2D e(a.rows(), a.cols());
  const double floor = 1e-300;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double r = std::abs(ref.storage()[k]);
    e.storage()[k] = r > floor ? std::abs(a.storage()[k] - ref.storage()[k]) / r : 0.0;
  }
  return e;
}

inline OperatorFactory negative_laplacian_factory() {
  return [](double h) { return OperatorSpec{-1.0 * laplacian_fdm_kernel(h), "-lap (5-point)", h, std::nullopt}; };
}

// ---------------------------------------------------------------------------
// Linear system

/// A = diag(4) - diag(+-1) - diag(+-W), horizontal couplings across row ends
/// removed; the five-point -lap with zero Dirichlet walls, h = 1.
inline SparseMatrix linear_system_matrix(int rows, int cols) {
  const int n = rows * cols;
  std::vector<Eigen::Triplet<double>> t;
  for (int k = 0; k < n; ++k) {
    t.emplace_back(k, k, 4.0);
    if (k - 1 >= 0 && k % cols != 0) t.emplace_back(k, k - 1, -1.0);
    if (k + 1 < n && (k + 1) % cols != 0) t.emplace_back(k, k + 1, -1.0);
    if (k - cols >= 0) t.emplace_back(k, k - cols, -1.0);
    if (k + cols < n) t.emplace_back(k, k + cols, -1.0);
  }
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

inline Field2D linear_system_rhs(int rows, int cols) {
  return gaussian_source(rows, cols, 10.0, rows / 2.0, cols / 2.0, 15.0);
}

inline CaseReport run_linear_system_case(int rows, int cols, SolverConfig config) {
  CaseReport rep{"linear", rows, cols, 1.0, {}, {}, {}, {}, false, {}};
  const Field2D b = linear_system_rhs(rows, cols);
  const Field2D exact = direct_sparse_oracle(linear_system_matrix(rows, cols), b);
  const auto res = solve(negative_laplacian_factory(), b, config);
  for (std::size_t c = 0; c < res.history.residuals.size(); ++c) {
    rep.series.push_back({{"cycle", static_cast<double>(c)}, {"relative_residual", res.history.residuals[c]}});
  }
  const Array2D rel = pointwise_relative_error(res.solution.values, exact.values);
  rep.parameters = {{"tolerance", config.tolerance}, {"K", config.window}};
  rep.metrics = {{"l2_relative_error", relative_l2_error(res.solution.values, exact.values)},
                 {"max_abs_error", max_abs_diff(res.solution.values, exact.values)},
                 {"max_pointwise_relative_error", max_abs(rel)},
                 {"cycles", static_cast<double>(res.history.cycles)},
                 {"final_relative_residual", res.history.residuals.back()},
                 {"quantum_calls", static_cast<double>(res.history.quantum_calls)},
                 {"converged", res.history.converged ? 1.0 : 0.0}};
  rep.fields = {{"exact", exact}, {"solution", res.solution}, {"relative_error", Field2D(rel, 1.0)}};
  return rep;
}

// ---------------------------------------------------------------------------
// Poisson with a dipole source

inline Field2D dipole_source(int rows, int cols) {
  Field2D plus = gaussian_source(rows, cols, 20.0, rows / 3.0, cols / 3.0, 15.0);
  const Field2D minus = gaussian_source(rows, cols, 20.0, 2.0 * rows / 3.0, 2.0 * cols / 3.0, 15.0);
  axpy(plus.values, -1.0, minus.values);
  return plus;
}

/// -lap phi = rho on 24 x 40 from a zero guess; runs config.max_cycles W-cycles
/// (stopping early only at the tolerance) and records the error per cycle.
inline CaseReport run_poisson_case(SolverConfig config, int rows = 24, int cols = 40) {
  CaseReport rep{"poisson", rows, cols, 1.0, {}, {}, {}, {}, false, {}};
  config.validate();
  const Field2D rho = dipole_source(rows, cols);
  const auto factory = negative_laplacian_factory();
  const Field2D exact = direct_sparse_oracle(factory(1.0).kernel, rho);
  const GridHierarchy hier(rows, cols, 1.0, factory, config);
  CallCounters counters;
  Field2D x = rho.like();
  const double bnorm = l2_norm(rho.values);
  auto record = [&](int cycle) {
    const double r = bnorm > 0.0 ? l2_norm(residual(x, hier.level(0).op, rho, config).values) / bnorm : 0.0;
    rep.series.push_back({{"cycle", static_cast<double>(cycle)},
                          {"relative_residual", r},
                          {"l2_relative_error", l2_norm(exact.values) > 0.0 ? relative_l2_error(x.values, exact.values)
                                                                          : l2_norm(x.values)},
                          {"max_abs_error", max_abs_diff(x.values, exact.values)}});
    return r;
  };
  double r = record(0);
  int cycles = 0;
  while (cycles < config.max_cycles && r > config.tolerance) {
    x = w_cycle(0, std::move(x), rho, hier, config, &counters);
    ++cycles;
    r = record(cycles);
  }
  const auto& last = rep.series.back();
  rep.parameters = {{"cycles_budget", config.max_cycles}, {"pre_smooths", config.pre_smooths},
                    {"post_smooths", config.post_smooths}, {"levels", static_cast<double>(hier.depth())}};
  rep.metrics = {{"cycles", static_cast<double>(cycles)},
                 {"l2_relative_error", last.at("l2_relative_error")},
                 {"max_abs_error", last.at("max_abs_error")},
                 {"final_relative_residual", r},
                 {"quantum_calls", static_cast<double>(counters.quantum_calls)}};
  if (rep.series.size() > 6) {
    rep.metrics["l2_relative_error_after_6"] = rep.series[6].at("l2_relative_error");
    rep.metrics["max_abs_error_after_6"] = rep.series[6].at("max_abs_error");
  }
  rep.fields = {{"source", rho}, {"exact", exact}, {"solution", x}};
  return rep;
}

// ---------------------------------------------------------------------------
// Transient diffusion, implicit Euler

struct DiffusionParams {
  int rows = 16;
  int cols = 24;
  double alpha = 1.0;
  double dt = 0.5;
  int steps = 20;
  int cycles_per_step = 10;
  double source_amplitude = 10.0;
};

/// (I - dt alpha lap) phi^{n+1} = phi^n + dt rho. The per-step reference is
/// the direct solve of the same system with the same right-hand side.
inline CaseReport run_diffusion_case(SolverConfig config, const DiffusionParams& p = {}) {
  CaseReport rep{"diffusion", p.rows, p.cols, 1.0, {}, {}, {}, {}, false, {}};
  const Field2D rho = gaussian_source(p.rows, p.cols, p.source_amplitude, p.rows / 2.0, p.cols / 2.0, 15.0);
  const OperatorFactory factory = [&p](double h) {
    return assemble_operator({{1.0, Kernel3x3::identity()}, {-p.dt * p.alpha, laplacian_fdm_kernel(h)}},
                             "I - dt alpha lap", h);
  };
  const Kernel3x3 fine_kernel = factory(1.0).kernel;
  config.max_cycles = p.cycles_per_step;
  config.tolerance = std::min(config.tolerance, 1e-300);  // fixed cycle count per step
  const GridHierarchy hier(p.rows, p.cols, 1.0, factory, config);

  Field2D phi = rho.like();
  double max_rel = 0.0;
  std::size_t quantum_calls = 0;
  for (int step = 1; step <= p.steps; ++step) {
    Field2D rhs = phi;
    axpy(rhs.values, p.dt, rho.values);
    const Field2D ref = direct_sparse_oracle(fine_kernel, rhs);
    CallCounters counters;
    Field2D x = phi;  // warm start
    for (int c = 0; c < p.cycles_per_step; ++c) x = w_cycle(0, std::move(x), rhs, hier, config, &counters);
    quantum_calls += counters.quantum_calls;
    Array2D diff = x.values;
    axpy(diff, -1.0, ref.values);
    const double l2 = l2_norm(diff);
    const double rel = l2_norm(ref.values) > 0.0 ? relative_l2_error(x.values, ref.values) : l2_norm(x.values);
    max_rel = std::max(max_rel, rel);
    rep.series.push_back({{"step", static_cast<double>(step)},
                          {"time", step * p.dt},
                          {"l2_error", l2},
                          {"relative_error", rel},
                          {"max_abs_error", max_abs_diff(x.values, ref.values)},
                          {"total_energy", sum(x.values)}});
    phi = std::move(x);
    if (step % 5 == 0) rep.fields.emplace_back("phi_step" + std::to_string(step), phi);
  }
  rep.parameters = {{"alpha", p.alpha}, {"dt", p.dt}, {"steps", p.steps}, {"cycles_per_step", p.cycles_per_step}};
  rep.metrics = {{"max_relative_error", max_rel},
                 {"final_relative_error", rep.series.back().at("relative_error")},
                 {"final_l2_error", rep.series.back().at("l2_error")},
                 {"quantum_calls", static_cast<double>(quantum_calls)}};
  return rep;
}

// ---------------------------------------------------------------------------
// Convection-diffusion of a Gaussian pulse

struct GaussianPulse {
  double x0 = 0.5;
  double y0 = 0.5;
  double sigma0 = 0.12;
  double u = 0.3;
  double v = 0.15;
  double alpha = 0.01;

  /// Infinite-domain solution at time t.
  double operator()(double x, double y, double t) const {
    if (t < 0.0) throw InvalidArgument("time must be nonnegative");
    const double s2 = sigma0 * sigma0 + 2.0 * alpha * t;
    const double dx = x - (x0 + u * t);
    const double dy = y - (y0 + v * t);
    return sigma0 * sigma0 / s2 * std::exp(-(dx * dx + dy * dy) / (2.0 * s2));
  }
  double peak(double t) const { return sigma0 * sigma0 / (sigma0 * sigma0 + 2.0 * alpha * t); }
  std::pair<double, double> centre(double t) const { return {x0 + u * t, y0 + v * t}; }
};

/// The analytic solution sampled at cell centres.
inline Field2D analytic_gaussian_cd(const GaussianPulse& g, double t, int rows, int cols, double h) {
  Field2D f(rows, cols, h);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) f(i, j) = g((j + 0.5) * h, (i + 0.5) * h, t);
  }
  return f;
}

struct PeakEstimate {
  double value;
  double x;
  double y;
};

/// Argmax refined by a 3-point parabola along each axis (edge maxima are not refined).
inline PeakEstimate locate_peak(const Field2D& f) {
  int bi = 0;
  int bj = 0;
  for (int i = 0; i < f.rows(); ++i) {
    for (int j = 0; j < f.cols(); ++j) {
      if (f(i, j) > f(bi, bj)) {
        bi = i;
        bj = j;
      }
    }
  }
  const double f0 = f(bi, bj);
  double value = f0;
  auto refine = [&](double fm, double fp, double& offset) {
    const double curv = fm - 2.0 * f0 + fp;
    if (curv >= 0.0) return;
    offset = 0.5 * (fm - fp) / curv;
    value -= (fp - fm) * (fp - fm) / (8.0 * curv);
  };
  double di = 0.0;
  double dj = 0.0;
  if (bj > 0 && bj + 1 < f.cols()) refine(f(bi, bj - 1), f(bi, bj + 1), dj);
  if (bi > 0 && bi + 1 < f.rows()) refine(f(bi - 1, bj), f(bi + 1, bj), di);
  return {value, (bj + 0.5 + dj) * f.h, (bi + 0.5 + di) * f.h};
}

struct ConvectionDiffusionParams {
  int n = 32;
  double length = 2.0;
  double dt = 0.01;
  int steps = 100;
  GaussianPulse pulse{};
  double published_analytic_peak = 0.4144;
};

inline OperatorFactory convection_diffusion_factory(const GaussianPulse& g, double dt) {
  return [g, dt](double h) {
    return assemble_operator({{1.0, Kernel3x3::identity()},
                              {dt, convfem_convection_kernel(g.u, g.v, h)},
                              {dt * g.alpha, convfem_diffusion_kernel(h)}},
                             "I + dt (C - alpha lap), ConvFEM", h);
  };
}

/// Backward Euler (I + dt (C - alpha lap)) phi^{n+1} = phi^n with zero walls.
inline CaseReport run_convection_diffusion_case(SolverConfig config, const ConvectionDiffusionParams& p = {}) {
  const double h = p.length / p.n;
  CaseReport rep{"convection_diffusion", p.n, p.n, h, {}, {}, {}, {}, false, {}};
  const GaussianPulse& g = p.pulse;
  const OperatorFactory factory = convection_diffusion_factory(g, p.dt);
  const GridHierarchy hier(p.n, p.n, h, factory, config);
  Field2D phi = analytic_gaussian_cd(g, 0.0, p.n, p.n, h);
  const double mass0 = sum(phi.values);
  std::size_t quantum_calls = 0;
  double worst_step_drift = 0.0;
  double prev_mass = mass0;
  for (int step = 1; step <= p.steps; ++step) {
    const Field2D rhs = phi;
    CallCounters counters;
    const double bnorm = l2_norm(rhs.values);
    for (int c = 0; c < config.max_cycles; ++c) {
      phi = w_cycle(0, std::move(phi), rhs, hier, config, &counters);
      if (l2_norm(residual(phi, hier.level(0).op, rhs, config).values) <= config.tolerance * bnorm) break;
    }
    quantum_calls += counters.quantum_calls;
    const double t = step * p.dt;
    const double mass = sum(phi.values);
    worst_step_drift = std::max(worst_step_drift, std::abs(mass - prev_mass) / std::abs(mass0));
    prev_mass = mass;
    const PeakEstimate pk = locate_peak(phi);
    const auto [cx, cy] = g.centre(t);
    rep.series.push_back({{"step", static_cast<double>(step)},
                          {"time", t},
                          {"peak", pk.value},
                          {"analytic_peak", g.peak(t)},
                          {"centre_x", pk.x},
                          {"centre_y", pk.y},
                          {"analytic_centre_x", cx},
                          {"analytic_centre_y", cy},
                          {"mass_drift", (mass - mass0) / mass0}});
    if (step % 25 == 0) rep.fields.emplace_back("phi_step" + std::to_string(step), phi);
  }
  const double T = p.steps * p.dt;
  const PeakEstimate pk = locate_peak(phi);
  const auto [cx, cy] = g.centre(T);
  rep.fields.emplace_back("analytic_final", analytic_gaussian_cd(g, T, p.n, p.n, h));
  rep.parameters = {{"alpha", g.alpha}, {"u", g.u}, {"v", g.v}, {"dt", p.dt}, {"steps", p.steps}, {"sigma0", g.sigma0}};
  rep.metrics = {{"numerical_peak", pk.value},
                 {"analytic_peak", g.peak(T)},
                 {"published_analytic_peak", p.published_analytic_peak},
                 {"peak_relative_error", std::abs(pk.value - g.peak(T)) / g.peak(T)},
                 {"centre_x", pk.x},
                 {"centre_y", pk.y},
                 {"centre_error", std::hypot(pk.x - cx, pk.y - cy)},
                 {"mass_drift", std::abs(sum(phi.values) - mass0) / std::abs(mass0)},
                 {"max_step_mass_drift", worst_step_drift},
                 {"quantum_calls", static_cast<double>(quantum_calls)}};
  return rep;
}

// ---------------------------------------------------------------------------
// Flow past a square cylinder

struct NavierStokesParams {
  int rows = 64;
  int cols = 256;
  double h = 1.0;
  double nu = 0.1;
  double dt = 0.05;
  int steps = 2000;
  double inlet_velocity = 1.0;
  double sigma = 1e8;
  int cylinder_side = 12;
  /// lower-left cell of the obstacle; one cell above centre to seed the asymmetry
  int cylinder_row = 27;
  int cylinder_col = 58;
  /// cross-stream probe, two side lengths behind the obstacle on the centreline
  int probe_row = 32;
  int probe_col = 94;
  int snapshot_every = 500;
  /// 0 disables quantum re-verification of the pressure solve
  int spot_check_every = 1000;
  double pressure_tolerance = 1e-8;
  int pressure_max_cycles = 40;
};

/// Staggered velocity: u(i, j) on the left face of cell (i, j), v(i, j) on its
/// bottom face, p at the centre. u(:, 0) is the inlet, v(0, :) the bottom wall;
/// the top wall and the outlet faces are implied by the boundary rules.
struct NSState {
  Field2D u;
  Field2D v;
  Field2D p;
  Array2D mask;  ///< 1 inside the obstacle, 0 in the fluid (cell based)
  double time = 0.0;
};

namespace ns_detail {

inline double at_or(const Array2D& a, int i, int j, double fallback) {
  return (i >= 0 && i < a.rows() && j >= 0 && j < a.cols()) ? a(i, j) : fallback;
}

/// u with ghost ring: inlet value on the left, copy at the outlet, odd
/// reflection at the no-slip walls.
inline Array2D pad_u(const Array2D& u, double inlet) {
  const int H = u.rows();
  const int W = u.cols();
  Array2D p(H + 2, W + 2, 0.0);
  for (int i = 0; i < H; ++i) {
    for (int j = 0; j < W; ++j) p(i + 1, j + 1) = u(i, j);
    p(i + 1, 0) = inlet;
    p(i + 1, W + 1) = u(i, W - 1);
  }
  for (int j = 0; j <= W + 1; ++j) {
    p(0, j) = -p(1, j);
    p(H + 1, j) = -p(H, j);
  }
  return p;
}

/// v with ghost ring: odd reflection about the bottom wall, the top wall face
/// itself (zero) above, odd reflection at the inlet, copy at the outlet.
inline Array2D pad_v(const Array2D& v) {
  const int H = v.rows();
  const int W = v.cols();
  Array2D p(H + 2, W + 2, 0.0);
  for (int i = 0; i < H; ++i) {
    for (int j = 0; j < W; ++j) p(i + 1, j + 1) = v(i, j);
    p(i + 1, 0) = -v(i, 0);
    p(i + 1, W + 1) = v(i, W - 1);
  }
  for (int j = 0; j <= W + 1; ++j) {
    p(0, j) = H > 1 ? -p(2, j) : 0.0;
    p(H + 1, j) = 0.0;
  }
  return p;
}

/// Outlet face velocities: zero-gradient copy plus a uniform shift making the
/// outflow equal the inflow.
inline std::vector<double> outlet_flux(const Array2D& u) {
  const int H = u.rows();
  const int W = u.cols();
  std::vector<double> out(static_cast<std::size_t>(H));
  double q_in = 0.0;
  double q_out = 0.0;
  for (int i = 0; i < H; ++i) {
    out[static_cast<std::size_t>(i)] = u(i, W - 1);
    q_in += u(i, 0);
    q_out += u(i, W - 1);
  }
  const double shift = (q_in - q_out) / H;
  for (auto& o : out) o += shift;
  return out;
}

inline Array2D divergence(const Array2D& u, const Array2D& v, const std::vector<double>& u_out, double h) {
  const int H = u.rows();
  const int W = u.cols();
  Array2D d(H, W);
  for (int i = 0; i < H; ++i) {
    for (int j = 0; j < W; ++j) {
      const double ue = j + 1 < W ? u(i, j + 1) : u_out[static_cast<std::size_t>(i)];
      const double vn = i + 1 < H ? v(i + 1, j) : 0.0;
      d(i, j) = (ue - u(i, j) + vn - v(i, j)) / h;
    }
  }
  return d;
}

/// Cell-centred velocity components.
inline std::pair<Array2D, Array2D> centred_velocity(const NSState& s) {
  const int H = s.u.rows();
  const int W = s.u.cols();
  const auto u_out = outlet_flux(s.u.values);
  Array2D uc(H, W);
  Array2D vc(H, W);
  for (int i = 0; i < H; ++i) {
    for (int j = 0; j < W; ++j) {
      const double ue = j + 1 < W ? s.u(i, j + 1) : u_out[static_cast<std::size_t>(i)];
      const double vn = i + 1 < H ? s.v(i + 1, j) : 0.0;
      uc(i, j) = 0.5 * (s.u(i, j) + ue);
      vc(i, j) = 0.5 * (s.v(i, j) + vn);
    }
  }
  return {uc, vc};
}

}  // namespace ns_detail

inline NSState make_ns_state(const NavierStokesParams& p) {
  if (p.rows < 4 || p.cols < 4) throw InvalidArgument("flow grid must be at least 4x4");
  NSState s{Field2D(p.rows, p.cols, p.h), Field2D(p.rows, p.cols, p.h),
            Field2D(p.rows, p.cols, p.h, BoundarySpec::neumann()), Array2D(p.rows, p.cols, 0.0), 0.0};
  for (int i = p.cylinder_row; i < std::min(p.rows, p.cylinder_row + p.cylinder_side); ++i) {
    for (int j = p.cylinder_col; j < std::min(p.cols, p.cylinder_col + p.cylinder_side); ++j) s.mask(i, j) = 1.0;
  }
  for (int i = 0; i < p.rows; ++i) s.u(i, 0) = p.inlet_velocity;
  return s;
}

/// Vorticity dv/dx - du/dy at cell centres (central differences, one-sided
/// at the edges).
inline Field2D vorticity(const NSState& s) {
  const auto [uc, vc] = ns_detail::centred_velocity(s);
  const int H = uc.rows();
  const int W = uc.cols();
  const double h = s.u.h;
  Field2D w(H, W, h);
  for (int i = 0; i < H; ++i) {
    for (int j = 0; j < W; ++j) {
      const int jl = std::max(j - 1, 0);
      const int jr = std::min(j + 1, W - 1);
      const int ib = std::max(i - 1, 0);
      const int it = std::min(i + 1, H - 1);
      w(i, j) = (vc(i, jr) - vc(i, jl)) / ((jr - jl) * h) - (uc(it, j) - uc(ib, j)) / ((it - ib) * h);
    }
  }
  return w;
}

inline double kinetic_energy(const NSState& s) {
  const auto [uc, vc] = ns_detail::centred_velocity(s);
  return 0.5 * (dot(uc, uc) + dot(vc, vc)) * s.u.h * s.u.h;
}

/// Explicit Euler momentum predictor with ConvFEM convection and diffusion,
/// followed by the implicit pointwise penalty u / (1 + dt sigma mask).
inline std::pair<Array2D, Array2D> momentum_predictor(const NSState& s, const NavierStokesParams& p) {
  const int H = p.rows;
  const int W = p.cols;
  const Kernel3x3 cx = convfem_convection_kernel(1.0, 0.0, p.h);
  const Kernel3x3 cy = convfem_convection_kernel(0.0, 1.0, p.h);
  const Kernel3x3 diff = convfem_diffusion_kernel(p.h);  // -lap
  const Array2D& u = s.u.values;
  const Array2D& v = s.v.values;
  const auto u_out = ns_detail::outlet_flux(u);
  const Array2D pu = ns_detail::pad_u(u, p.inlet_velocity);
  const Array2D pv = ns_detail::pad_v(v);

  Array2D us(H, W);
  Array2D vs(H, W);
  for (int i = 0; i < H; ++i) {
    for (int j = 0; j < W; ++j) {
      // u face: v interpolated from the four surrounding v faces
      const double va = 0.25 * (ns_detail::at_or(v, i, j - 1, 0.0) + v(i, j) + ns_detail::at_or(v, i + 1, j - 1, 0.0) +
                                ns_detail::at_or(v, i + 1, j, 0.0));
      const double du = -(u(i, j) * kernel_at_valid(pu, cx, i, j) + va * kernel_at_valid(pu, cy, i, j)) -
                        p.nu * kernel_at_valid(pu, diff, i, j);
      const bool solid_u = s.mask(i, j) > 0.0 || (j > 0 && s.mask(i, j - 1) > 0.0);
      us(i, j) = (u(i, j) + p.dt * du) / (1.0 + p.dt * p.sigma * (solid_u ? 1.0 : 0.0));

      // v face: u interpolated from the four surrounding u faces
      const double ue = j + 1 < W ? u(i, j + 1) : u_out[static_cast<std::size_t>(i)];
      const double ue_b = i > 0 ? (j + 1 < W ? u(i - 1, j + 1) : u_out[static_cast<std::size_t>(i - 1)]) : -ue;
      const double ua = 0.25 * (u(i, j) + ue + (i > 0 ? u(i - 1, j) : -u(i, j)) + ue_b);
      const double dv = -(ua * kernel_at_valid(pv, cx, i, j) + v(i, j) * kernel_at_valid(pv, cy, i, j)) -
                        p.nu * kernel_at_valid(pv, diff, i, j);
      const bool solid_v = s.mask(i, j) > 0.0 || (i > 0 && s.mask(i - 1, j) > 0.0);
      vs(i, j) = (v(i, j) + p.dt * dv) / (1.0 + p.dt * p.sigma * (solid_v ? 1.0 : 0.0));
    }
  }
  for (int i = 0; i < H; ++i) us(i, 0) = p.inlet_velocity;
  for (int j = 0; j < W; ++j) vs(0, j) = 0.0;
  return {us, vs};
}

inline OperatorFactory pressure_factory() { return negative_laplacian_factory(); }

struct ProjectionStats {
  double divergence_before = 0.0;
  double divergence_after = 0.0;
  int pressure_cycles = 0;
  bool pressure_converged = false;
  /// max |p_quantum - p_classical| when the step was spot-checked, else -1
  double spot_check_difference = -1.0;
};

/// One time step: predictor, pressure Poisson -lap p = -div(u*)/dt (zero
/// normal gradient on every side), correction, gauge p = 0 at the top-right cell.
inline ProjectionStats navier_stokes_step(NSState& s, const NavierStokesParams& p, SolverConfig config,
                                          bool spot_check = false) {
  auto [us, vs] = momentum_predictor(s, p);
  const auto u_out = ns_detail::outlet_flux(us);
  const Array2D div = ns_detail::divergence(us, vs, u_out, p.h);

  Field2D rhs(p.rows, p.cols, p.h, BoundarySpec::neumann());
  for (std::size_t k = 0; k < rhs.values.size(); ++k) rhs.values.storage()[k] = -div.storage()[k] / p.dt;
  config.tolerance = p.pressure_tolerance;
  config.max_cycles = p.pressure_max_cycles;
  const Backend requested = config.backend;
  if (requested == Backend::kHybridSpotCheck) config.backend = Backend::kClassical;
  const Field2D p0 = s.p;
  auto res = solve(pressure_factory(), rhs, config, &p0);

  ProjectionStats st;
  st.pressure_cycles = res.history.cycles;
  st.pressure_converged = res.history.converged;
  if (spot_check && res.history.cycles > 0) {
    SolverConfig q = config;
    q.backend = Backend::kQuantum;
    q.max_cycles = res.history.cycles;
    q.tolerance = 1e-300;
    const auto qres = solve(pressure_factory(), rhs, q, &p0);
    st.spot_check_difference = max_abs_diff(qres.solution.values, res.solution.values);
  }
  Field2D pr = std::move(res.solution);
  const double gauge = pr(p.rows - 1, p.cols - 1);
  for (auto& x : pr.values.storage()) x -= gauge;

  for (int i = 0; i < p.rows; ++i) {
    for (int j = 1; j < p.cols; ++j) us(i, j) -= p.dt * (pr(i, j) - pr(i, j - 1)) / p.h;
  }
  for (int i = 1; i < p.rows; ++i) {
    for (int j = 0; j < p.cols; ++j) vs(i, j) -= p.dt * (pr(i, j) - pr(i - 1, j)) / p.h;
  }
  st.divergence_before = l2_norm(div);
  st.divergence_after = l2_norm(ns_detail::divergence(us, vs, u_out, p.h));
  s.u.values = std::move(us);
  s.v.values = std::move(vs);
  s.p = std::move(pr);
  s.time += p.dt;
  return st;
}

/// Sign changes of a signal, ignoring excursions smaller than `threshold`.
inline int count_sign_alternations(const std::vector<double>& signal, double threshold) {
  int count = 0;
  int last = 0;
  for (double x : signal) {
    const int sgn = x > threshold ? 1 : (x < -threshold ? -1 : 0);
    if (sgn == 0) continue;
    if (last != 0 && sgn != last) ++count;
    last = sgn;
  }
  return count;
}

inline CaseReport run_navier_stokes_case(const NavierStokesParams& p, SolverConfig config) {
  CaseReport rep{"navier_stokes", p.rows, p.cols, p.h, {}, {}, {}, {}, false, {}};
  config.max_levels = std::max(config.max_levels, 5);
  config.validate();
  NSState s = make_ns_state(p);
  std::vector<double> probe;
  double worst_ratio = std::numeric_limits<double>::infinity();
  double max_ke = 0.0;
  double worst_spot = 0.0;
  int spot_checks = 0;
  int unconverged = 0;
  for (int step = 1; step <= p.steps; ++step) {
    const bool spot = config.backend == Backend::kHybridSpotCheck && p.spot_check_every > 0 &&
                      (step % p.spot_check_every == 0 || step == 1);
    const ProjectionStats st = navier_stokes_step(s, p, config, spot);
    const double ke = kinetic_energy(s);
    if (!std::isfinite(ke) || !s.p.all_finite()) {
      rep.failed = true;
      rep.failure = "non-finite state at step " + std::to_string(step);
      break;
    }
    const auto [uc, vc] = ns_detail::centred_velocity(s);
    probe.push_back(vc(p.probe_row, p.probe_col));
    const double ratio = st.divergence_after > 0.0 ? st.divergence_before / st.divergence_after
                                                   : std::numeric_limits<double>::infinity();
    if (st.divergence_before > 0.0) worst_ratio = std::min(worst_ratio, ratio);
    max_ke = std::max(max_ke, ke);
    if (!st.pressure_converged) ++unconverged;
    if (st.spot_check_difference >= 0.0) {
      ++spot_checks;
      worst_spot = std::max(worst_spot, st.spot_check_difference);
    }
    rep.series.push_back({{"step", static_cast<double>(step)},
                          {"time", s.time},
                          {"probe_v", probe.back()},
                          {"kinetic_energy", ke},
                          {"divergence_before", st.divergence_before},
                          {"divergence_after", st.divergence_after},
                          {"pressure_cycles", static_cast<double>(st.pressure_cycles)},
                          {"spot_check_difference", st.spot_check_difference}});
    if (p.snapshot_every > 0 && step % p.snapshot_every == 0) {
      rep.fields.emplace_back("vorticity_step" + std::to_string(step), vorticity(s));
    }
  }
  double probe_max = 0.0;
  for (double x : probe) probe_max = std::max(probe_max, std::abs(x));
  rep.fields.emplace_back("u_final", s.u);
  rep.fields.emplace_back("v_final", s.v);
  rep.fields.emplace_back("p_final", s.p);
  rep.fields.emplace_back("vorticity_final", vorticity(s));
  rep.parameters = {{"nu", p.nu}, {"dt", p.dt}, {"steps", p.steps}, {"sigma", p.sigma},
                    {"reynolds", p.inlet_velocity * p.cylinder_side * p.h / p.nu}};
  rep.metrics = {{"steps_completed", static_cast<double>(rep.series.size())},
                 {"probe_sign_alternations", static_cast<double>(count_sign_alternations(probe, 1e-3 * probe_max))},
                 {"probe_max_abs", probe_max},
                 {"max_kinetic_energy", max_ke},
                 {"final_kinetic_energy", rep.series.empty() ? 0.0 : rep.series.back().at("kinetic_energy")},
                 {"min_divergence_reduction", worst_ratio},
                 {"unconverged_pressure_solves", static_cast<double>(unconverged)},
                 {"spot_checks", static_cast<double>(spot_checks)},
                 {"max_spot_check_difference", spot_checks > 0 ? worst_spot : 0.0}};
  return rep;
}

}  // namespace qnp

#endif  // QNP_PDE_SUITE_HPP
