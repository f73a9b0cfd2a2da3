#ifndef QNP_STENCILS_HPP
#define QNP_STENCILS_HPP

// Every discrete operator used by the solvers, as a Kernel3x3 in the
// translation convention of grid.hpp (x along columns, y along rows).
//
// Sign conventions:
//   laplacian_fdm_kernel      represents +lap
//   convfem_diffusion_kernel  represents -lap (as the ConvFEM weights are printed)
//   *_convection_kernel       represent +(u d/dx + v d/dy)

#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qnp/errors.hpp"
#include "qnp/grid.hpp"

namespace qnp {

/// A kernel plus what it stands for and the spacing it was built at.
struct OperatorSpec {
  Kernel3x3 kernel;
  std::string description;
  double h = 1.0;
  /// Largest stable explicit step for this operator, when known.
  std::optional<double> stable_dt;
};

/// Builds the operator for a given grid spacing (used for rediscretization on
/// coarse multigrid levels).
using OperatorFactory = std::function<OperatorSpec(double h)>;

/// Receives non-fatal diagnostics; defaults to stderr.
inline std::function<void(const std::string&)>& warning_sink() {
  static std::function<void(const std::string&)> sink = [](const std::string& msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return sink;
}

namespace detail {
inline void require_spacing(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("grid spacing must be positive");
}
}  // namespace detail

/// Five-point Laplacian, (1/h^2) [[0,1,0],[1,-4,1],[0,1,0]].
inline Kernel3x3 laplacian_fdm_kernel(double h) {
  detail::require_spacing(h);
  const double s = 1.0 / (h * h);
  return {{0.0, s, 0.0}, {s, -4.0 * s, s}, {0.0, s, 0.0}};
}

/// First-order upwind convection. Each velocity component takes its
/// one-sided difference from the upstream neighbour, so the centre weight is
/// (|u| + |v|) / h. For u = v > 0 the CNN-read weights (rotated180) are the
/// familiar [[0,-1,0],[-1,2,0],[0,0,0]] / h pattern.
inline Kernel3x3 upwind_convection_kernel(double u, double v, double h) {
  detail::require_spacing(h);
  Kernel3x3 k;
  k.at(0, 0) = (std::abs(u) + std::abs(v)) / h;
  // translation by dc = +1 samples x - h; dc = -1 samples x + h
  if (u != 0.0) k.at(0, u > 0.0 ? 1 : -1) = -std::abs(u) / h;
  if (v != 0.0) k.at(v > 0.0 ? 1 : -1, 0) = -std::abs(v) / h;
  return k;
}

/// Second-order central convection, (1/2h) [[0,v,0],[u,0,-u],[0,-v,0]].
inline Kernel3x3 central_convection_kernel(double u, double v, double h) {
  detail::require_spacing(h);
  const double s = 1.0 / (2.0 * h);
  return {{0.0, v * s, 0.0}, {u * s, 0.0, -u * s}, {0.0, -v * s, 0.0}};
}

/// ConvFEM second-order diffusion, (1/3h^2) [[-1,-1,-1],[-1,8,-1],[-1,-1,-1]].
/// Applied to x^2 + y^2 it returns -4, i.e. it is the -lap operator.
inline Kernel3x3 convfem_diffusion_kernel(double h) {
  detail::require_spacing(h);
  const double s = 1.0 / (3.0 * h * h);
  return {{-s, -s, -s}, {-s, 8.0 * s, -s}, {-s, -s, -s}};
}

/// ConvFEM second-order convection,
/// (1/12h) [[u+v, 4v, -u+v], [4u, 0, -4u], [u-v, -4v, -u-v]].
inline Kernel3x3 convfem_convection_kernel(double u, double v, double h) {
  detail::require_spacing(h);
  const double s = 1.0 / (12.0 * h);
  return {{(u + v) * s, 4.0 * v * s, (-u + v) * s},
          {4.0 * u * s, 0.0, -4.0 * u * s},
          {(u - v) * s, -4.0 * v * s, (-u - v) * s}};
}

/// Entrywise scaled sum of kernels.
inline OperatorSpec assemble_operator(const std::vector<std::pair<double, Kernel3x3>>& parts,
                                      std::string description = "assembled", double h = 1.0) {
  if (parts.empty()) throw InvalidArgument("assemble_operator needs at least one part");
  Kernel3x3 k;
  for (const auto& [scale, part] : parts) k += scale * part;
  return {k, std::move(description), h, std::nullopt};
}

/// min(h / 2|u|, h / 2|v|, h^2 / 4D), skipping zero terms.
inline double cfl_max_timestep(double u_max, double v_max, double diffusivity, double h) {
  detail::require_spacing(h);
  double dt = std::numeric_limits<double>::infinity();
  if (u_max != 0.0) dt = std::min(dt, h / (2.0 * std::abs(u_max)));
  if (v_max != 0.0) dt = std::min(dt, h / (2.0 * std::abs(v_max)));
  if (diffusivity != 0.0) dt = std::min(dt, h * h / (4.0 * std::abs(diffusivity)));
  if (!std::isfinite(dt)) throw InvalidArgument("CFL bound needs a nonzero velocity or diffusivity");
  return dt;
}

/// T + dt * (op(T) + S). Boundaries follow T's ghost-cell rule, so Dirichlet
/// walls stay at zero without a separate reimposition pass.
inline Field2D explicit_euler_step(const Field2D& T, const OperatorSpec& op, const Field2D& S, double dt) {
  if (!T.values.same_shape(S.values)) throw ShapeMismatch("field and source shapes differ");
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (op.stable_dt && dt > *op.stable_dt) {
    warning_sink()("explicit step " + std::to_string(dt) + " exceeds the CFL bound " + std::to_string(*op.stable_dt));
  }
  Field2D next = T;
  const Array2D applied = apply_kernel(T, op.kernel);
  for (std::size_t k = 0; k < next.values.size(); ++k) {
    next.values.storage()[k] += dt * (applied.storage()[k] + S.values.storage()[k]);
  }
  return next;
}

}  // namespace qnp

#endif  // QNP_STENCILS_HPP
