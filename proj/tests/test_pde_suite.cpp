#include <gtest/gtest.h>

#include "qnp/pde_suite.hpp"
#include "test_support.hpp"

using namespace qnp;
using qnp::testing::Gen;

TEST(Sources, GaussianPeakAndSymmetry) {
  const Field2D f = gaussian_source(16, 32, 10.0, 8.0, 16.0, 15.0);
  EXPECT_DOUBLE_EQ(f(8, 16), 10.0);
  EXPECT_DOUBLE_EQ(f(7, 16), f(9, 16));
  EXPECT_DOUBLE_EQ(f(8, 15), f(8, 17));
  EXPECT_NEAR(f(8, 17), 10.0 * std::exp(-1.0 / 15.0), 1e-14);
  EXPECT_THROW(gaussian_source(4, 4, 1.0, 2, 2, 0.0), InvalidArgument);
  const Field2D d = dipole_source(24, 40);
  EXPECT_NEAR(d(8, 13), -d(16, 27), 1e-12);
}

TEST(LinearSystem, MatrixStructure) {
  const SparseMatrix a = linear_system_matrix(3, 4);
  const Eigen::MatrixXd d(a);
  EXPECT_DOUBLE_EQ(d(3, 4), 0.0);  // no coupling across a row end
  EXPECT_DOUBLE_EQ(d(4, 3), 0.0);
  EXPECT_DOUBLE_EQ(d(5, 1), -1.0);
  EXPECT_TRUE(d.isApprox(d.transpose()));
}

TEST(LinearSystem, SolverRecoversKnownSolution) {
  const SparseMatrix a = linear_system_matrix(16, 16);
  Field2D b(16, 16, 1.0);
  b.values = unflatten(a * Eigen::VectorXd::Ones(256), 16, 16);
  SolverConfig c;
  c.tolerance = 1e-12;
  c.max_cycles = 40;
  const auto res = solve(negative_laplacian_factory(), b, c);
  EXPECT_LT(max_abs_diff(res.solution.values, Array2D(16, 16, 1.0)), 1e-10);
}

TEST(LinearSystem, CaseMeetsAccuracy) {
  SolverConfig c;
  c.tolerance = 1e-10;
  c.max_cycles = 40;
  const CaseReport r = run_linear_system_case(16, 32, c);
  EXPECT_LE(r.metrics.at("l2_relative_error"), 1e-4);
  EXPECT_EQ(r.metrics.at("converged"), 1.0);
  EXPECT_TRUE(r.all_metrics_finite());
}

TEST(Poisson, ZeroSourceGivesZero) {
  SolverConfig c;
  const auto res = solve(negative_laplacian_factory(), Field2D(24, 40, 1.0), c);
  EXPECT_EQ(max_abs(res.solution.values), 0.0);
}

TEST(Poisson, CaseConvergesWithinTwelveCycles) {
  SolverConfig c;
  c.max_cycles = 12;
  c.tolerance = 1e-14;
  const CaseReport r = run_poisson_case(c);
  EXPECT_LE(r.metrics.at("l2_relative_error"), 1e-4);
  EXPECT_LE(r.metrics.at("max_abs_error"), 0.02);
  EXPECT_EQ(r.series.size(), 13u);
}

TEST(Diffusion, ZeroSourceStaysZero) {
  DiffusionParams p;
  p.steps = 3;
  p.source_amplitude = 0.0;
  const CaseReport r = run_diffusion_case(SolverConfig{}, p);
  for (const auto& row : r.series) EXPECT_EQ(row.at("max_abs_error"), 0.0);
  EXPECT_EQ(max_abs(r.fields.empty() ? Array2D(1, 1) : r.fields.back().second.values), 0.0);
}

TEST(Diffusion, ErrorsStaySmallAndEnergyGrows) {
  DiffusionParams p;
  p.steps = 8;
  const CaseReport r = run_diffusion_case(SolverConfig{}, p);
  ASSERT_EQ(r.series.size(), 8u);
  for (std::size_t k = 0; k < r.series.size(); ++k) {
    EXPECT_LE(r.series[k].at("relative_error"), 1e-3);
    if (k > 0) {
      EXPECT_GE(r.series[k].at("total_energy"), r.series[k - 1].at("total_energy"));
      EXPECT_LE(r.series[k].at("relative_error"), r.series[k - 1].at("relative_error"));
    }
  }
}

TEST(GaussianPulseModel, AnalyticValues) {
  const GaussianPulse g;
  EXPECT_DOUBLE_EQ(g(0.5, 0.5, 0.0), 1.0);
  EXPECT_NEAR(g.peak(1.0), 0.0144 / 0.0344, 1e-15);
  const auto [cx, cy] = g.centre(1.0);
  EXPECT_NEAR(cx, 0.8, 1e-15);
  EXPECT_NEAR(cy, 0.65, 1e-15);
  EXPECT_NEAR(g(0.8, 0.65, 1.0), g.peak(1.0), 1e-15);
  EXPECT_THROW(g(0, 0, -1.0), InvalidArgument);
}

TEST(GaussianPulseModel, PeakLocatorIsSubCell) {
  GaussianPulse g;
  g.x0 = 0.53;
  g.y0 = 0.47;
  const Field2D f = analytic_gaussian_cd(g, 0.0, 32, 32, 2.0 / 32);
  const PeakEstimate pk = locate_peak(f);
  EXPECT_NEAR(pk.x, 0.53, 0.01);
  EXPECT_NEAR(pk.y, 0.47, 0.01);
  EXPECT_NEAR(pk.value, 1.0, 5e-3);
}

TEST(ConvectionDiffusion, ShortRunTracksThePulse) {
  ConvectionDiffusionParams p;
  p.steps = 10;
  SolverConfig c;
  c.tolerance = 1e-12;
  c.max_cycles = 30;
  const CaseReport r = run_convection_diffusion_case(c, p);
  const double h = p.length / p.n;
  EXPECT_LE(r.metrics.at("centre_error"), h);
  EXPECT_LE(r.metrics.at("mass_drift"), 2e-3);
  EXPECT_LE(r.metrics.at("max_step_mass_drift"), 1e-4);
  EXPECT_LE(r.metrics.at("peak_relative_error"), 0.02);
}

namespace {

NavierStokesParams small_flow() {
  NavierStokesParams p;
  p.rows = 16;
  p.cols = 48;
  p.cylinder_side = 4;
  p.cylinder_row = 6;
  p.cylinder_col = 10;
  p.probe_row = 8;
  p.probe_col = 20;
  p.steps = 20;
  p.snapshot_every = 0;
  p.spot_check_every = 10;
  return p;
}

}  // namespace

TEST(NavierStokes, InitialStateAndPredictor) {
  const NavierStokesParams p = small_flow();
  const NSState s = make_ns_state(p);
  EXPECT_EQ(sum(s.mask), 16.0);
  EXPECT_EQ(s.u(3, 0), 1.0);
  EXPECT_EQ(s.u(3, 1), 0.0);
  const auto [us, vs] = momentum_predictor(s, p);
  // diffusion pulls the inlet profile into the first interior faces only
  EXPECT_GT(us(8, 1), 0.0);
  EXPECT_EQ(us(8, 3), 0.0);
  EXPECT_EQ(max_abs(vs), 0.0);
  for (int i = 0; i < p.rows; ++i) EXPECT_EQ(us(i, 0), 1.0);
}

TEST(NavierStokes, ProjectionRemovesDivergence) {
  const NavierStokesParams p = small_flow();
  NSState s = make_ns_state(p);
  SolverConfig c;
  c.max_levels = 5;
  for (int step = 0; step < 5; ++step) {
    const ProjectionStats st = navier_stokes_step(s, p, c);
    EXPECT_TRUE(st.pressure_converged);
    EXPECT_GE(st.divergence_before, 10.0 * st.divergence_after);
  }
  EXPECT_DOUBLE_EQ(s.p(p.rows - 1, p.cols - 1), 0.0);
  EXPECT_NEAR(s.time, 5 * p.dt, 1e-12);
}

TEST(NavierStokes, ObstacleVelocityIsPenalized) {
  const NavierStokesParams p = small_flow();
  NSState s = make_ns_state(p);
  SolverConfig c;
  c.max_levels = 5;
  for (int step = 0; step < 10; ++step) navier_stokes_step(s, p, c);
  // the penalty zeroes solid faces in the predictor; the projection then
  // leaves only a small residual velocity inside the obstacle
  const auto [us, vs] = momentum_predictor(s, p);
  EXPECT_LT(std::abs(us(8, 12)), 1e-6);
  EXPECT_LT(std::abs(vs(8, 12)), 1e-6);
  EXPECT_LT(std::abs(s.u(8, 12)), 0.05);
  EXPECT_GT(s.u(2, 12), 0.5);
}

TEST(NavierStokes, HybridCaseSpotChecksAgree) {
  const NavierStokesParams p = small_flow();
  SolverConfig c;
  c.backend = Backend::kHybridSpotCheck;
  const CaseReport r = run_navier_stokes_case(p, c);
  EXPECT_FALSE(r.failed);
  EXPECT_EQ(r.metrics.at("steps_completed"), 20.0);
  EXPECT_EQ(r.metrics.at("spot_checks"), 3.0);  // steps 1, 10, 20
  EXPECT_LE(r.metrics.at("max_spot_check_difference"), 1e-7);
  EXPECT_GE(r.metrics.at("min_divergence_reduction"), 10.0);
  EXPECT_TRUE(r.all_metrics_finite());
}

TEST(NavierStokes, SignAlternationCounting) {
  EXPECT_EQ(count_sign_alternations({0.0, 1.0, -1.0, 1.0, -1.0}, 0.1), 3);
  EXPECT_EQ(count_sign_alternations({1.0, 0.05, -0.05, 1.0}, 0.1), 0);
  EXPECT_EQ(count_sign_alternations({1.0, 0.0, -1.0}, 0.1), 1);
  EXPECT_EQ(count_sign_alternations({}, 0.1), 0);
}
