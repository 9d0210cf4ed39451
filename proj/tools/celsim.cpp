// celsim command-line tool: moment trajectories, squeezing, entanglement and
// photon-number observables, figure CSVs, and oracle verification.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "celsim/analytic.hpp"
#include "celsim/config.hpp"
#include "celsim/fock_oracle.hpp"
#include "celsim/metrics.hpp"
#include "celsim/model.hpp"
#include "celsim/ode_oracle.hpp"
#include "celsim/sweep.hpp"
#include "celsim/trajectory.hpp"

namespace {

using namespace celsim;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::optional<double> A, kappa, eta, nbar_a, nbar_b;
  std::optional<double> t, t_max, dt;
  std::string config;
};

struct PointOptions {
  bool steady = false;
  std::string engine = "analytic";
  double h = 1e-3;
  int cutoff = 25;
  bool force_fock = false;
};

enum class Report { moments, squeezing, entanglement, photon };

RunConfig resolve_config(const Overrides& o) {
  RunConfig cfg;
  std::string path = o.config;
  if (path.empty())
    if (const char* env = std::getenv("CELSIM_CONFIG")) path = env;
  if (!path.empty()) cfg = load_config(path, cfg);
  auto apply = [](double& field, const std::optional<double>& v) {
    if (v) field = *v;
  };
  apply(cfg.params.A, o.A);
  apply(cfg.params.kappa, o.kappa);
  apply(cfg.params.eta, o.eta);
  apply(cfg.params.nbar_a, o.nbar_a);
  apply(cfg.params.nbar_b, o.nbar_b);
  apply(cfg.t_max, o.t_max);
  apply(cfg.dt, o.dt);
  return cfg;
}

bool check_params(const ModelParams& p) {
  const auto report = validate(p);
  for (const auto& e : report.errors) std::cerr << "invalid parameter: " << e << '\n';
  return report.ok();
}

void add_param_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--A", o.A, "linear gain coefficient");
  cmd->add_option("--kappa", o.kappa, "cavity damping constant");
  cmd->add_option("--eta", o.eta, "population inversion in [-1, 1]");
  cmd->add_option("--nbar-a", o.nbar_a, "thermal seed photons in mode a");
  cmd->add_option("--nbar-b", o.nbar_b, "thermal seed photons in mode b");
  cmd->add_option("--config", o.config, "key = value config file (default $CELSIM_CONFIG)");
}

std::vector<MomentState> fock_states(const ModelParams& p, double t_end,
                                     double h, std::size_t every, int cutoff) {
  FockState rho = thermal_product_state(p.nbar_a, p.nbar_b, cutoff, cutoff);
  FockOptions fo;
  fo.sample_every = every;
  fo.audit_every = 0;
  const FockRun run = evolve(rho, p, t_end, h, fo);
  if (run.truncation_suspect)
    std::cerr << "warning: TRUNCATION-SUSPECT, tail mass " << run.max_tail_mass
              << " exceeds " << fo.tail_threshold << '\n';
  std::vector<MomentState> out;
  for (const auto& s : run.samples)
    out.push_back({TimePoint::at(s.t), s.moments.u, s.moments.v, s.moments.ab.real()});
  return out;
}

std::vector<MomentState> compute_states(const RunConfig& cfg,
                                        const Overrides& o,
                                        const PointOptions& opt) {
  const ModelParams& p = cfg.params;
  if (opt.steady) {
    if (opt.engine != "analytic")
      throw UsageError("--steady is only available with --engine analytic");
    return {steady_state_moments(p)};
  }

  const bool single = o.t.has_value();
  const double t_end = single ? *o.t : cfg.t_max;
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw UsageError("time must be >= 0");
  if (!single && !(cfg.dt > 0.0)) throw UsageError("--dt must be positive");

  if (opt.engine == "analytic") {
    if (single) return {moments(p, t_end)};
    return analytic_trajectory(p, uniform_grid(cfg.t_max, cfg.dt)).points;
  }
  if (opt.engine != "ode" && opt.engine != "fock")
    throw UsageError("unknown engine '" + opt.engine + "'");
  if (!(opt.h > 0.0)) throw UsageError("--h must be positive");
  if (opt.engine == "fock" && !opt.force_fock && (p.A > 2.0 || t_end > 5.0))
    throw std::invalid_argument(
        "fock engine limited to A <= 2 and t_max <= 5 (truncation); "
        "pass --force-fock to override");

  if (t_end == 0.0) return {MomentState{TimePoint::at(0.0), p.nbar_a, p.nbar_b, 0.0}};

  // Oracle steps are refined so that every grid point is hit exactly.
  double step = std::min(opt.h, t_end);
  std::size_t every = 1;
  if (!single) {
    const auto grid_steps = uniform_grid(t_end, cfg.dt).size() - 1;
    const double grid_dt = t_end / static_cast<double>(grid_steps);
    every = static_cast<std::size_t>(std::max(1.0, std::ceil(grid_dt / opt.h - 1e-9)));
    step = grid_dt / static_cast<double>(every);
  }
  std::vector<MomentState> states =
      opt.engine == "ode" ? integrate(p, t_end, step, every).points
                          : fock_states(p, t_end, step, every, opt.cutoff);
  if (single) return {states.back()};
  return states;
}

void print_states(const std::vector<MomentState>& states, Report report) {
  std::cout << "t,u,v,w";
  switch (report) {
    case Report::moments: break;
    case Report::squeezing: std::cout << ",dc_plus,dc_minus"; break;
    case Report::entanglement: std::cout << ",Vs,EN,entangled"; break;
    case Report::photon: std::cout << ",two_nbar"; break;
  }
  std::cout << '\n';
  for (const auto& s : states) {
    std::cout << (s.time.is_steady() ? std::string("inf") : format_double(s.time.value()))
              << ',' << format_double(s.u) << ',' << format_double(s.v) << ','
              << format_double(s.w);
    switch (report) {
      case Report::moments: break;
      case Report::squeezing:
        std::cout << ',' << format_double(quadrature_variance(s, Sign::plus)) << ','
                  << format_double(quadrature_variance(s, Sign::minus));
        break;
      case Report::entanglement: {
        const CovarianceRecord r = covariance_record(s);
        std::cout << ',' << format_double(r.v_s) << ',' << format_double(r.e_n) << ','
                  << (is_entangled(r) ? "true" : "false");
        break;
      }
      case Report::photon:
        std::cout << ',' << format_double(mean_photon_number(s));
        break;
    }
    std::cout << '\n';
  }
}

int write_figures(const std::string& which, const Overrides& o,
                  const std::string& out_dir, bool provenance) {
  std::vector<int> ids;
  if (which == "all") {
    for (int id = 1; id <= kFigureCount; ++id) ids.push_back(id);
  } else {
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(which, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != which.size() || id < 1 || id > kFigureCount)
      throw UsageError("figure must be 1..13 or 'all', got '" + which + "'");
    ids.push_back(id);
  }
  std::filesystem::create_directories(out_dir);
  for (int id : ids) {
    FigureConfig cfg = figure_config(id);
    if (o.t_max) cfg.t_max = *o.t_max;
    if (o.dt) cfg.dt = *o.dt;
    if (!(cfg.t_max > 0.0) || !(cfg.dt > 0.0))
      throw UsageError("--t-max and --dt must be positive");
    cfg.provenance = provenance;
    const auto path = std::filesystem::path(out_dir) / csv_file_name(id);
    std::ofstream file(path, std::ios::binary);
    if (!file) {
      std::cerr << "cannot write " << path.string() << '\n';
      return kExitFailure;
    }
    run_figure(cfg, file);
    std::cout << path.string() << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded two-photon correlated-emission laser: moments, squeezing, "
               "entanglement and figure data"};
  app.require_subcommand(1);
  // Short -h would collide with the --h step-size option.
  app.set_help_flag("--help", "print this help message and exit");

  Overrides o;
  PointOptions point;
  Report report = Report::moments;

  auto add_point_command = [&](const char* name, const char* help, Report r) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_param_flags(cmd, o);
    cmd->add_option("--t", o.t, "single evaluation time");
    cmd->add_option("--t-max", o.t_max, "end of the time grid");
    cmd->add_option("--dt", o.dt, "time grid spacing");
    cmd->add_flag("--steady", point.steady, "steady-state values");
    cmd->add_option("--engine", point.engine, "analytic | ode | fock")
        ->check(CLI::IsMember({"analytic", "ode", "fock"}));
    cmd->add_option("--h", point.h, "oracle step size");
    cmd->add_option("--cutoff", point.cutoff, "Fock cutoff per mode")
        ->check(CLI::Range(2, 200));
    cmd->add_flag("--force-fock", point.force_fock,
                  "allow the fock engine beyond A <= 2, t_max <= 5");
    cmd->callback([&report, r] { report = r; });
    return cmd;
  };
  add_point_command("moments", "print t, u, v, w", Report::moments);
  add_point_command("squeezing", "add quadrature variances", Report::squeezing);
  add_point_command("entanglement", "add V_s, E_N and verdict", Report::entanglement);
  add_point_command("photon", "add mean photon number 2N", Report::photon);

  std::string figure_id;
  std::string out_dir = ".";
  bool provenance = false;
  CLI::App* figure = app.add_subcommand("figure", "write figNN.csv");
  figure->add_option("id", figure_id, "figure number 1..13 or 'all'")->required();
  figure->add_option("--out", out_dir, "output directory");
  figure->add_option("--t-max", o.t_max, "end of the time grid");
  figure->add_option("--dt", o.dt, "time grid spacing");
  figure->add_flag("--provenance", provenance, "add u, v, w columns per curve");

  VerifyOptions verify_opt;
  std::string profile = "standard";
  CLI::App* verify = app.add_subcommand("verify", "cross-oracle verification");
  verify->add_option("--profile", profile, "standard | fock | all")
      ->check(CLI::IsMember({"standard", "fock", "all"}));
  verify->add_option("--h", verify_opt.h, "ODE step for the analytic comparison");
  verify->add_option("--fock-h", verify_opt.fock_h, "step for the Fock comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*figure) return write_figures(figure_id, o, out_dir, provenance);
    if (*verify) {
      verify_opt.profile = profile == "fock" ? VerifyProfile::fock
                           : profile == "all" ? VerifyProfile::all
                                              : VerifyProfile::standard;
      const VerificationReport r = verify_all(verify_opt);
      std::cout << r.text();
      return r.passed() ? kExitOk : kExitFailure;
    }
    const RunConfig cfg = resolve_config(o);
    if (!check_params(cfg.params)) return kExitFailure;
    print_states(compute_states(cfg, o, point), report);
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
