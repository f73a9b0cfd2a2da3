// qnp: runs the benchmark cases, prints circuit resources and applies single
// operators through either backend.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qnp/io.hpp"
#include "qnp/multigrid.hpp"
#include "qnp/pde_suite.hpp"
#include "qnp/qconv.hpp"
#include "qnp/stencils.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct RunConfig {
  std::string case_name = "poisson";
  std::string backend = "classical";
  int window = 4;
  std::optional<std::pair<int, int>> grid;
  std::optional<int> cycles;
  std::optional<double> tolerance;
  std::optional<int> steps;
  std::string out = "qnp_out";
  unsigned seed = 12345;
  int pre_smooths = 2;
  int post_smooths = 2;
  double omega = 2.0 / 3.0;
  int coarse_iterations = 50;
  int levels = 3;
  bool images = true;
};

const std::vector<std::string> kCases{"linear", "poisson", "diffusion", "convection-diffusion", "navier-stokes"};

void apply_config_file(const std::string& path, RunConfig& rc) {
  std::ifstream is(path);
  if (!is) throw qnp::InvalidArgument("cannot read config " + path);
  for (const auto& [k, v] : qnp::parse_key_values(is)) {
    auto as_int = [&] { return static_cast<int>(qnp::parse_double(v)); };
    if (k == "case") rc.case_name = v;
    else if (k == "backend") rc.backend = v;
    else if (k == "K") rc.window = as_int();
    else if (k == "grid") rc.grid = qnp::parse_grid(v);
    else if (k == "cycles") rc.cycles = as_int();
    else if (k == "tol") rc.tolerance = qnp::parse_double(v);
    else if (k == "steps") rc.steps = as_int();
    else if (k == "out") rc.out = v;
    else if (k == "seed") rc.seed = static_cast<unsigned>(as_int());
    else if (k == "eta" || k == "pre_smooths") rc.pre_smooths = as_int();
    else if (k == "phi" || k == "post_smooths") rc.post_smooths = as_int();
    else if (k == "omega") rc.omega = qnp::parse_double(v);
    else if (k == "coarse_iterations") rc.coarse_iterations = as_int();
    else if (k == "levels") rc.levels = as_int();
    else if (k == "images") rc.images = v == "1" || v == "true";
    else throw qnp::InvalidArgument("unknown config key '" + k + "'");
  }
}

qnp::SolverConfig solver_config(const RunConfig& rc) {
  qnp::SolverConfig c;
  c.backend = qnp::parse_backend(rc.backend);
  c.window = rc.window;
  c.pre_smooths = rc.pre_smooths;
  c.post_smooths = rc.post_smooths;
  c.omega = rc.omega;
  c.coarse_iterations = rc.coarse_iterations;
  c.max_levels = rc.levels;
  if (rc.cycles) c.max_cycles = *rc.cycles;
  if (rc.tolerance) c.tolerance = *rc.tolerance;
  c.validate();
  return c;
}

json stats_json(const std::vector<int>& windows) {
  json out = json::array();
  for (int k : windows) {
    const auto s = qnp::circuit_stats(k);
    json per_stage = json::object();
    for (const auto& [stage, n] : s.gates_by_stage) per_stage[stage] = n;
    out.push_back({{"K", s.window},
                   {"n_qubits", s.n_qubits},
                   {"gate_count", s.gate_count},
                   {"depth", s.depth},
                   {"gates_by_stage", per_stage},
                   {"counting_convention", s.counting_convention}});
  }
  return out;
}

qnp::CaseReport run_case(const RunConfig& rc) {
  qnp::SolverConfig c = solver_config(rc);
  if (rc.case_name == "linear") {
    const auto [h, w] = rc.grid.value_or(std::pair{16, 32});
    if (!rc.tolerance) c.tolerance = 1e-10;
    if (!rc.cycles) c.max_cycles = 40;
    return qnp::run_linear_system_case(h, w, c);
  }
  if (rc.case_name == "poisson") {
    const auto [h, w] = rc.grid.value_or(std::pair{24, 40});
    if (!rc.tolerance) c.tolerance = 1e-14;
    if (!rc.cycles) c.max_cycles = 12;
    return qnp::run_poisson_case(c, h, w);
  }
  if (rc.case_name == "diffusion") {
    qnp::DiffusionParams p;
    if (rc.grid) std::tie(p.rows, p.cols) = *rc.grid;
    if (rc.steps) p.steps = *rc.steps;
    if (rc.cycles) p.cycles_per_step = *rc.cycles;
    return qnp::run_diffusion_case(c, p);
  }
  if (rc.case_name == "convection-diffusion") {
    qnp::ConvectionDiffusionParams p;
    if (rc.grid) {
      if (rc.grid->first != rc.grid->second) throw qnp::InvalidArgument("convection-diffusion grid must be square");
      p.n = rc.grid->first;
    }
    if (rc.steps) p.steps = *rc.steps;
    if (!rc.tolerance) c.tolerance = 1e-12;
    if (!rc.cycles) c.max_cycles = 30;
    return qnp::run_convection_diffusion_case(c, p);
  }
  if (rc.case_name == "navier-stokes") {
    qnp::NavierStokesParams p;
    if (rc.grid) std::tie(p.rows, p.cols) = *rc.grid;
    if (rc.steps) p.steps = *rc.steps;
    if (rc.tolerance) p.pressure_tolerance = *rc.tolerance;
    if (rc.cycles) p.pressure_max_cycles = *rc.cycles;
    if (rc.grid) {
      // scale the obstacle and probe with a non-default grid
      p.cylinder_side = std::max(2, p.rows / 6);
      p.cylinder_row = p.rows / 2 - p.cylinder_side / 2 + 1;
      p.cylinder_col = p.cols / 4;
      p.probe_row = p.rows / 2;
      p.probe_col = std::min(p.cols - 1, p.cylinder_col + 3 * p.cylinder_side);
    }
    return qnp::run_navier_stokes_case(p, c);
  }
  throw qnp::InvalidArgument("unknown case '" + rc.case_name + "'");
}

int cmd_run(const RunConfig& rc) {
  const qnp::CaseReport rep = run_case(rc);
  fs::create_directories(rc.out);
  {
    std::ofstream os(fs::path(rc.out) / "metrics.csv");
    if (!os) throw qnp::InvalidArgument("cannot write to " + rc.out);
    qnp::write_metrics_csv(os, rep.series);
  }
  {
    std::ofstream os(fs::path(rc.out) / "summary.csv");
    os << "key,value\n";
    os << "case," << rep.name << '\n';
    os << "H," << rep.rows << "\nW," << rep.cols << "\nh," << qnp::format_double(rep.h) << '\n';
    for (const auto& [k, v] : rep.parameters) os << "param." << k << ',' << qnp::format_double(v) << '\n';
    for (const auto& [k, v] : rep.metrics) os << k << ',' << qnp::format_double(v) << '\n';
  }
  for (const auto& [name, field] : rep.fields) {
    qnp::write_field_csv((fs::path(rc.out) / ("field_" + name + ".csv")).string(), field);
    if (rc.images) qnp::write_pgm((fs::path(rc.out) / ("field_" + name + ".pgm")).string(), field);
  }
  {
    std::ofstream os(fs::path(rc.out) / "circuit_stats.json");
    os << stats_json({rc.window}).dump(2) << '\n';
  }
  std::cout << "case " << rep.name << " (" << rep.rows << "x" << rep.cols << ", h=" << rep.h << ")\n";
  for (const auto& [k, v] : rep.metrics) std::cout << "  " << k << " = " << qnp::format_double(v) << '\n';
  if (rep.failed) {
    std::cerr << "case failed: " << rep.failure << '\n';
    return 2;
  }
  return 0;
}

qnp::Kernel3x3 named_kernel(const std::string& name, double u, double v, double h) {
  if (name == "identity") return qnp::Kernel3x3::identity();
  if (name == "laplacian") return qnp::laplacian_fdm_kernel(h);
  if (name == "upwind") return qnp::upwind_convection_kernel(u, v, h);
  if (name == "central") return qnp::central_convection_kernel(u, v, h);
  if (name == "convfem-diffusion") return qnp::convfem_diffusion_kernel(h);
  if (name == "convfem-convection") return qnp::convfem_convection_kernel(u, v, h);
  throw qnp::InvalidArgument("unknown kernel '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid quantum-classical multigrid PDE solver"};
  app.require_subcommand(1);

  RunConfig rc;
  std::string grid_text;
  std::string config_path;
  auto* run = app.add_subcommand("run", "run a benchmark case");
  run->add_option("--case", rc.case_name, "case name")->check(CLI::IsMember(kCases));
  run->add_option("--backend", rc.backend, "classical | quantum | hybrid-spot-check");
  run->add_option("--K", rc.window, "quantum window size");
  run->add_option("--grid", grid_text, "grid as HxW");
  auto* cycles_opt = run->add_option("--cycles", "W-cycle budget (per step for time-dependent cases)");
  auto* tol_opt = run->add_option("--tol", "relative residual tolerance");
  auto* steps_opt = run->add_option("--steps", "time steps");
  run->add_option("--out", rc.out, "output directory");
  run->add_option("--seed", rc.seed, "random seed");
  run->add_option("--config", config_path, "key=value configuration file");
  run->add_flag("--no-images{false}", rc.images, "skip PGM heatmaps");

  std::vector<int> stats_windows{4, 8, 16};
  std::string stats_out;
  auto* stats = app.add_subcommand("stats", "circuit qubits, gate count and depth");
  stats->add_option("--K", stats_windows, "window sizes")->expected(1, -1);
  stats->add_option("--out", stats_out, "also write JSON to this file");

  std::string input;
  std::string output;
  std::string kernel_name = "laplacian";
  std::string conv_backend = "quantum";
  std::string random_grid;
  int conv_window = 4;
  double vel_u = 1.0;
  double vel_v = 1.0;
  unsigned conv_seed = 12345;
  auto* conv = app.add_subcommand("convolve", "apply one operator to a field file");
  conv->add_option("--input", input, "field CSV (H,W,h header)");
  conv->add_option("--random", random_grid, "use a random HxW field instead of --input");
  conv->add_option("--kernel", kernel_name, "identity | laplacian | upwind | central | convfem-diffusion | convfem-convection");
  conv->add_option("--backend", conv_backend, "classical | quantum");
  conv->add_option("--K", conv_window, "quantum window size");
  conv->add_option("--u", vel_u, "x velocity for convection kernels");
  conv->add_option("--v", vel_v, "y velocity for convection kernels");
  conv->add_option("--output", output, "output field CSV");
  conv->add_option("--seed", conv_seed, "random seed for --random");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!config_path.empty()) apply_config_file(config_path, rc);
      // explicit flags win over the configuration file
      for (const auto& opt : run->get_options()) {
        if (opt->count() == 0) continue;
        const std::string n = opt->get_name();
        if (n == "--case") rc.case_name = opt->as<std::string>();
        if (n == "--backend") rc.backend = opt->as<std::string>();
        if (n == "--K") rc.window = opt->as<int>();
        if (n == "--out") rc.out = opt->as<std::string>();
        if (n == "--seed") rc.seed = opt->as<unsigned>();
      }
      if (!grid_text.empty()) rc.grid = qnp::parse_grid(grid_text);
      if (cycles_opt->count()) rc.cycles = cycles_opt->as<int>();
      if (tol_opt->count()) rc.tolerance = tol_opt->as<double>();
      if (steps_opt->count()) rc.steps = steps_opt->as<int>();
      if (std::find(kCases.begin(), kCases.end(), rc.case_name) == kCases.end()) {
        throw qnp::InvalidArgument("unknown case '" + rc.case_name + "'");
      }
      return cmd_run(rc);
    }
    if (stats->parsed()) {
      const json j = stats_json(stats_windows);
      std::cout << j.dump(2) << '\n';
      if (!stats_out.empty()) {
        std::ofstream os(stats_out);
        if (!os) throw qnp::InvalidArgument("cannot write " + stats_out);
        os << j.dump(2) << '\n';
      }
      return 0;
    }
    if (conv->parsed()) {
      qnp::Field2D f;
      if (!random_grid.empty()) {
        const auto [h, w] = qnp::parse_grid(random_grid);
        std::mt19937_64 rng(conv_seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        f = qnp::Field2D(h, w, 1.0);
        for (auto& x : f.values.storage()) x = dist(rng);
      } else if (!input.empty()) {
        f = qnp::read_field_csv(input);
      } else {
        throw qnp::InvalidArgument("convolve needs --input or --random");
      }
      const qnp::Kernel3x3 k = named_kernel(kernel_name, vel_u, vel_v, f.h);
      const qnp::OperatorSpec op{k, kernel_name, f.h, std::nullopt};
      qnp::SolverConfig cq;
      cq.window = conv_window;
      cq.backend = qnp::Backend::kQuantum;
      qnp::SolverConfig cc = cq;
      cc.backend = qnp::Backend::kClassical;
      const qnp::Field2D classical = qnp::apply_operator_sliding_window(f, op, cc);
      const qnp::Field2D quantum = qnp::apply_operator_sliding_window(f, op, cq);
      const qnp::Backend b = qnp::parse_backend(conv_backend);
      const qnp::Field2D& chosen = b == qnp::Backend::kQuantum ? quantum : classical;
      std::cout << "max_abs_difference " << qnp::format_double(qnp::max_abs_diff(quantum.values, classical.values))
                << '\n';
      if (!output.empty()) qnp::write_field_csv(output, chosen);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
