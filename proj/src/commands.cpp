#include "qbm/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "qbm/detection_stats.hpp"
#include "qbm/gaussian_dynamics.hpp"
#include "qbm/perturbation_order.hpp"
#include "qbm/sql_limits.hpp"
#include "qbm/wigner_grid.hpp"

namespace qbm {

namespace {

void kv(std::ostream& out, const std::string& key, double value) { out << key << " = " << format_double(value) << '\n'; }
void kv(std::ostream& out, const std::string& key, const std::string& value) { out << key << " = " << value << '\n'; }

std::string output_path(const RunConfig& rc, const std::string& name) {
  std::filesystem::create_directories(rc.out);
  return (std::filesystem::path(rc.out) / name).string();
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ",") + format_double(x);
  return s;
}

}  // namespace

void cmd_sql(const RunConfig& rc, std::ostream& out) {
  const ExperimentConfig& e = rc.experiment;
  const double f_sql = force_sql(e.m, e.T, e.hbar);
  const double d_sql = diffusion_sql(e.m, e.T, e.hbar);
  const auto widths = optimal_widths(e.m, e.T, e.hbar);
  const auto spreads = diffusion_spreads(e.D, e.T, e.m);
  kv(out, "m", e.m);
  kv(out, "T", e.T);
  kv(out, "hbar", e.hbar);
  kv(out, "F", e.F);
  kv(out, "D", e.D);
  kv(out, "F_SQL", f_sql);
  kv(out, "D_SQL", d_sql);
  kv(out, "sigma_x_prep", widths.sigma_x_prep);
  kv(out, "sigma_p_prep", widths.sigma_p_prep);
  kv(out, "sigma_x_disp", widths.sigma_x_disp);
  kv(out, "sigma_x_meas", widths.sigma_x_meas);
  kv(out, "sigma_p_diff", spreads.sigma_p);
  kv(out, "sigma_x_diff", spreads.sigma_x);
  kv(out, "F/F_SQL", e.F / f_sql);
  kv(out, "D/D_SQL", e.D / d_sql);
  if (e.L) {
    const double dmin = d_min(e.T, *e.L, e.hbar);
    kv(out, "L", *e.L);
    kv(out, "D_min", dmin);
    kv(out, "tau_D", decoherence_time(e.D, *e.L, e.hbar));
    kv(out, "D/D_min", e.D / dmin);
    const auto gamma = decoherence_factor_from_config(e);
    kv(out, "s", gamma.s());
    kv(out, "theta", gamma.theta());
  }
}

void cmd_simulate(const RunConfig& rc, std::ostream& out) {
  ExperimentConfig e = rc.experiment;
  std::string state = rc.state;
  if (rc.scenario == "sql-gaussian") state = "gaussian";
  if (rc.scenario == "cat-fringes") state = "cat";
  const double sigma_default =
      state == "cat" ? std::sqrt(e.hbar * e.T / e.m) : optimal_widths(e.m, e.T, e.hbar).sigma_x_prep;
  const double sigma = rc.sigma_x.value_or(sigma_default);

  WignerExpansion initial;
  std::optional<CatState> cat;
  if (state == "cat") {
    if (!e.L) e.L = 12.0 * sigma;
    cat = CatState::symmetric(*e.L, sigma, e.hbar);
    initial = cat->wigner();
    if (rc.scenario == "cat-fringes" && !rc.has_diffusion) e.D = e.hbar * e.hbar / (*e.L * *e.L * e.T);
  } else {
    initial = wigner_expansion(GaussianState::pure(0.0, 0.0, sigma, e.hbar));
    if (rc.scenario == "sql-gaussian" && !rc.has_diffusion) e.D = diffusion_sql(e.m, e.T, e.hbar);
  }

  Window window;
  if (rc.window) {
    window = *rc.window;
  } else {
    window = auto_window(initial, e.D, e.m, e.T);
    const double shift_x = 0.5 * e.F * e.T * e.T / e.m;
    const double shift_p = e.F * e.T;
    window.xmin = std::min(window.xmin, window.xmin + shift_x);
    window.xmax = std::max(window.xmax, window.xmax + shift_x);
    window.pmin = std::min(window.pmin, window.pmin + shift_p);
    window.pmax = std::max(window.pmax, window.pmax + shift_p);
  }

  const WignerGrid grid0 = rasterize(initial, window, rc.nx, rc.np);
  WignerGrid free_grid = grid0;
  WignerGrid diff_grid = grid0;
  if (rc.mode == "analytic") {
    free_grid = rasterize(initial.evolved(0.0, e.m, e.T, e.F), window, rc.nx, rc.np);
    diff_grid = rasterize(initial.evolved(e.D, e.m, e.T, e.F), window, rc.nx, rc.np);
  } else {
    EvolveOptions options;
    options.steps = rc.steps;
    const double shift_x = 0.5 * e.F * e.T * e.T / e.m;
    const double shift_p = e.F * e.T;
    free_grid = translate_grid(evolve_grid(grid0, 0.0, e.m, e.T, options), shift_x, shift_p);
    diff_grid = translate_grid(evolve_grid(grid0, e.D, e.m, e.T, options), shift_x, shift_p);
  }

  const struct {
    const char* name;
    const WignerGrid* grid;
  } stages[] = {{"initial", &grid0}, {"free", &free_grid}, {"diffusive", &diff_grid}};

  kv(out, "mode", rc.mode);
  kv(out, "state", state);
  kv(out, "m", e.m);
  kv(out, "T", e.T);
  kv(out, "hbar", e.hbar);
  kv(out, "F", e.F);
  kv(out, "D", e.D);
  kv(out, "sigma_x", sigma);
  if (cat) kv(out, "L", *e.L);
  kv(out, "nx", static_cast<double>(rc.nx));
  kv(out, "np", static_cast<double>(rc.np));
  kv(out, "xmin", window.xmin);
  kv(out, "xmax", window.xmax);
  kv(out, "pmin", window.pmin);
  kv(out, "pmax", window.pmax);
  for (const auto& stage : stages) {
    const std::string name = stage.name;
    write_grid_file(output_path(rc, name + ".wg"), *stage.grid);
    const Marginal px = position_marginal(*stage.grid);
    const Marginal pp = momentum_marginal(*stage.grid);
    write_marginal_file(output_path(rc, name + "_x.csv"), px);
    write_marginal_file(output_path(rc, name + "_p.csv"), pp);
    kv(out, name + ".mass", stage.grid->mass());
    kv(out, name + ".var_x", px.variance());
    kv(out, name + ".var_p", pp.variance());
    if (px.clipped + pp.clipped > 0) kv(out, name + ".clipped_samples", static_cast<double>(px.clipped + pp.clipped));
  }
  if (cat) {
    const auto evolution = propagate_cat(*cat, e.D, e.m, e.T, e.F);
    kv(out, "gamma_abs", std::abs(evolution.gamma));
    kv(out, "gamma_arg", std::arg(evolution.gamma));
    kv(out, "visibility_free", fringe_visibility(momentum_marginal(free_grid), *e.L, e.hbar));
    kv(out, "visibility_grid", fringe_visibility(momentum_marginal(diff_grid), *e.L, e.hbar));
  }
}

void cmd_detect(const RunConfig& rc, std::ostream& out) {
  const ExperimentConfig& e = rc.experiment;
  const Hypothesis alt{rc.d_alt.value_or(diffusion_sql(e.m, e.T, e.hbar)), rc.f_alt.value_or(e.F)};
  kv(out, "family", rc.family);
  kv(out, "D", e.D);
  kv(out, "F", e.F);
  kv(out, "D_alt", alt.diffusion);
  kv(out, "F_alt", alt.force);
  double exponent = 0.0;
  if (rc.family == "cat") {
    const auto widths = optimal_widths(e.m, e.T, e.hbar);
    const double sigma = rc.sigma_x.value_or(widths.sigma_x_prep);
    const double L = e.L.value_or(20.0 * widths.sigma_x_meas);
    const CatState cat = CatState::symmetric(L, sigma, e.hbar);
    exponent = detection_error_exponent(cat, e, alt);
    const auto baseline = optimize_gaussian_preparation(e, alt, false);
    kv(out, "L", L);
    kv(out, "sigma_x", sigma);
    kv(out, "exponent", exponent);
    kv(out, "gaussian_exponent", baseline.best_exponent);
    kv(out, "ratio", exponent / baseline.best_exponent);
  } else {
    const auto search = optimize_gaussian_preparation(e, alt, rc.family == "contractive");
    exponent = search.best_exponent;
    const std::string path = output_path(rc, "surface.csv");
    std::ofstream file(path);
    if (!file) throw std::runtime_error("out: cannot write " + path);
    write_surface(file, search);
    kv(out, "exponent", exponent);
    kv(out, "sigma_x", search.best.sigma_x());
    kv(out, "r", search.best.correlation());
    kv(out, "r_step", search.r_step);
    kv(out, "surface", path);
  }
  for (int n : {1, 10, 100}) kv(out, "error_bound_n" + std::to_string(n), std::exp(-n * exponent));
}

void cmd_first_order(const RunConfig& rc, std::ostream& out) {
  if (rc.eps.size() < 3) throw std::invalid_argument("eps: need at least 3 points for a slope fit");
  const BipartiteSystem sys = rc.system == "commuting" ? BipartiteSystem::commuting(rc.d_probe, rc.d_env, rc.seed)
                                                       : BipartiteSystem::random(rc.d_probe, rc.d_env, rc.seed);
  std::vector<double> deficit;
  for (double eps : rc.eps) deficit.push_back(purity_deficit(sys, eps, rc.t));
  kv(out, "system", rc.system);
  kv(out, "dims", std::to_string(rc.d_probe) + "x" + std::to_string(rc.d_env));
  kv(out, "seed", std::to_string(rc.seed));
  kv(out, "t", rc.t);
  kv(out, "eps", join(rc.eps));
  kv(out, "deficit", join(deficit));
  double largest = 0.0;
  for (double d : deficit) largest = std::max(largest, d);
  kv(out, "max_deficit", largest);
  // Deficits at rounding level carry no scaling information.
  if (largest > 1e-24 && *std::min_element(deficit.begin(), deficit.end()) > 0.0) {
    kv(out, "slope", loglog_fit(rc.eps, deficit).slope);
  } else {
    kv(out, "slope", std::string("n/a"));
  }
  const std::string path = output_path(rc, "deficit.csv");
  std::ofstream file(path);
  if (!file) throw std::runtime_error("out: cannot write " + path);
  write_deficit_table(file, rc.eps, deficit);
  kv(out, "table", path);
}

void cmd_scale_hbar(const RunConfig& rc, std::ostream& out) {
  const ExperimentConfig& e = rc.experiment;
  e.separation();
  double drift = 0.0;
  for (double kappa : rc.kappa) {
    const auto scaled = hbar_scaling(e, kappa);
    const ExperimentConfig& c = scaled.scaled;
    const DecoherenceFactor gamma(scaled.gamma_after);
    const double d = std::abs(scaled.gamma_after - scaled.gamma_before) / std::abs(scaled.gamma_before);
    drift = std::max(drift, d);
    out << "[kappa = " << format_double(kappa) << "]\n";
    kv(out, "hbar", c.hbar);
    kv(out, "F", c.F);
    kv(out, "D", c.D);
    kv(out, "gamma_re", gamma.gamma().real());
    kv(out, "gamma_im", gamma.gamma().imag());
    kv(out, "s", gamma.s());
    kv(out, "theta", gamma.theta());
    kv(out, "F/F_SQL", c.F / force_sql(c.m, c.T, c.hbar));
    kv(out, "D/D_SQL", c.D / diffusion_sql(c.m, c.T, c.hbar));
  }
  kv(out, "max_gamma_drift", drift);
  kv(out, "gamma_drift_flag", std::string(drift > 1e-12 ? "yes" : "no"));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Decoherence and standard-quantum-limit toolkit", "qbmsim"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file");
  std::map<std::string, std::string> flags;
  for (const auto& key : config_keys()) {
    app.add_option("--" + key, flags[key], "override `" + key + "`");
  }
  struct Command {
    const char* name;
    const char* help;
    void (*run)(const RunConfig&, std::ostream&);
  };
  const Command commands[] = {
      {"sql", "SQL thresholds and ratios", cmd_sql},
      {"simulate", "phase-space evolution, grids and marginals", cmd_simulate},
      {"detect", "Chernoff discrimination between diffusion or force hypotheses", cmd_detect},
      {"first-order", "purity-deficit scaling in the coupling", cmd_first_order},
      {"scale-hbar", "hbar -> 0 invariance of the decoherence factor", cmd_scale_hbar},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help);

  std::vector<const char*> argv{"qbmsim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    KeyValues values;
    if (!config_path.empty()) values = parse_config_file(config_path);
    for (const auto& key : config_keys()) {
      if (app.count("--" + key) > 0) values[key] = flags[key];
    }
    const RunConfig rc = build_run_config(values);
    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) {
        std::ostringstream buffer;
        c.run(rc, buffer);
        out << buffer.str();
        return 0;
      }
    }
    err << "error: no subcommand\n";
    return 2;
  } catch (const std::exception& e) {
    out.flush();
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace qbm
