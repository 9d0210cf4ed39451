#pragma once

// Figure data sets (time series of one observable for a family of parameter
// values) and the cross-oracle verification matrix.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "celsim/analytic.hpp"
#include "celsim/fock_oracle.hpp"
#include "celsim/metrics.hpp"
#include "celsim/model.hpp"
#include "celsim/ode_oracle.hpp"
#include "celsim/trajectory.hpp"

namespace celsim {

enum class Observable { dc_minus, mean_photon, v_s, overlay };

/// Which parameter a figure sweeps. `nbar` sets both seeds to the same value.
enum class SweptParam { A, nbar_a, nbar_b, nbar };

inline constexpr int kFigureCount = 13;

struct FigureConfig {
  int id = 1;
  ModelParams fixed;
  SweptParam swept = SweptParam::A;
  std::vector<double> values;
  Observable observable = Observable::dc_minus;
  double t_max = 5.0;
  double dt = 0.01;
  bool provenance = false;  ///< also emit u, v, w per curve
};

inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string param_name(SweptParam s) {
  switch (s) {
    case SweptParam::A: return "A";
    case SweptParam::nbar_a: return "nbar_a";
    case SweptParam::nbar_b: return "nbar_b";
    case SweptParam::nbar: return "nbar";
  }
  return "?";
}

inline std::string curve_label(SweptParam s, double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", value);
  return param_name(s) + "=" + buf;
}

inline FigureConfig figure_config(int id) {
  if (id < 1 || id > kFigureCount)
    throw std::out_of_range("figure id must be in 1..13, got " +
                            std::to_string(id));
  FigureConfig cfg;
  cfg.id = id;
  cfg.fixed = ModelParams{};
  cfg.fixed.kappa = 0.5;
  const std::vector<double> seeds = {0.0, 0.5, 1.5, 3.0};

  if (id == 13) {
    cfg.fixed.A = 10.0;
    cfg.fixed.eta = 0.2;
    cfg.swept = SweptParam::nbar;
    cfg.values = {0.5};
    cfg.observable = Observable::overlay;
    return cfg;
  }

  // Figures come in families of four: an A sweep without seeding, then
  // n_a, n_b and equal seeds at a fixed A.
  const int family = (id - 1) / 4;  // 0: squeezing, 1: photon number, 2: V_s
  const int panel = (id - 1) % 4;
  static constexpr Observable kObs[] = {Observable::dc_minus,
                                        Observable::mean_photon,
                                        Observable::v_s};
  cfg.observable = kObs[family];
  cfg.fixed.eta = family == 0 ? 0.2 : 0.0;
  const double seeded_A = family == 1 ? 1.0 : 10.0;

  switch (panel) {
    case 0:
      cfg.swept = SweptParam::A;
      cfg.values = family == 1 ? std::vector<double>{0.5, 1.0, 2.0}
                               : std::vector<double>{2.0, 5.0, 10.0};
      break;
    case 1:
      cfg.fixed.A = seeded_A;
      cfg.swept = SweptParam::nbar_a;
      cfg.values = seeds;
      break;
    case 2:
      cfg.fixed.A = seeded_A;
      cfg.swept = SweptParam::nbar_b;
      cfg.values = seeds;
      break;
    default:
      cfg.fixed.A = seeded_A;
      cfg.swept = SweptParam::nbar;
      cfg.values = seeds;
      break;
  }
  return cfg;
}

inline ModelParams curve_params(const FigureConfig& cfg, double value) {
  ModelParams p = cfg.fixed;
  switch (cfg.swept) {
    case SweptParam::A: p.A = value; break;
    case SweptParam::nbar_a: p.nbar_a = value; break;
    case SweptParam::nbar_b: p.nbar_b = value; break;
    case SweptParam::nbar: p.nbar_a = p.nbar_b = value; break;
  }
  return p;
}

/// Value of a scalar observable. Throws for Observable::overlay.
inline double observable_value(Observable obs, const MomentState& s) {
  switch (obs) {
    case Observable::dc_minus: return quadrature_variance(s, Sign::minus);
    case Observable::mean_photon: return mean_photon_number(s);
    case Observable::v_s: return covariance_record(s).v_s;
    case Observable::overlay: break;
  }
  throw std::invalid_argument("overlay is not a scalar observable");
}

inline std::string csv_file_name(int id) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "fig%02d.csv", id);
  return buf;
}

/// Writes the figure CSV. Rows where a curve cannot be evaluated (unstable
/// growth, non-physical covariance) carry `nan` in that cell and a message in
/// a trailing `note` column, which is present only when some curve needs it.
inline void run_figure(const FigureConfig& cfg, std::ostream& out) {
  if (cfg.values.empty()) throw std::invalid_argument("figure has no curves");
  if (cfg.observable == Observable::overlay && cfg.values.size() != 1)
    throw std::invalid_argument("overlay figure takes exactly one curve");

  std::vector<ModelParams> params;
  for (double value : cfg.values) {
    const ModelParams p = curve_params(cfg, value);
    const auto report = validate(p);
    if (!report.ok())
      throw std::invalid_argument(curve_label(cfg.swept, value) + ": " +
                                  report.errors.front());
    params.push_back(p);
  }
  const auto times = uniform_grid(cfg.t_max, cfg.dt);

  std::vector<std::string> header{"t"};
  if (cfg.observable == Observable::overlay) {
    header.insert(header.end(), {"Vs", "dc_minus"});
  } else {
    for (double value : cfg.values) header.push_back(curve_label(cfg.swept, value));
  }
  if (cfg.provenance) {
    for (double value : cfg.values) {
      const std::string label = curve_label(cfg.swept, value);
      for (const char* m : {"u", "v", "w"}) header.push_back(std::string(m) + ":" + label);
    }
  }

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;
  bool any_note = false;
  for (std::size_t i = 0; i < times.size(); ++i) {
    std::vector<std::string> row{format_double(times[i])};
    std::vector<std::string> extra;
    std::string note;
    auto add_note = [&](const std::string& msg) {
      if (!note.empty()) note += "; ";
      note += msg;
    };
    for (std::size_t c = 0; c < params.size(); ++c) {
      const std::string label = curve_label(cfg.swept, cfg.values[c]);
      const MomentState s = moments(params[c], times[i]);
      if (i == 0 && !is_stable(params[c]))
        add_note(label + " unstable: kappa + A*eta <= 0");
      auto cell = [&](auto compute) {
        try {
          const double x = compute();
          if (!std::isfinite(x)) {
            add_note(label + " overflow");
            return std::string("nan");
          }
          return format_double(x);
        } catch (const NonPhysicalCovarianceError&) {
          add_note(label + " non-physical covariance");
          return std::string("nan");
        }
      };
      if (cfg.observable == Observable::overlay) {
        row.push_back(cell([&] { return covariance_record(s).v_s; }));
        row.push_back(cell([&] { return quadrature_variance(s, Sign::minus); }));
      } else {
        row.push_back(cell([&] { return observable_value(cfg.observable, s); }));
      }
      if (cfg.provenance) {
        extra.push_back(format_double(s.u));
        extra.push_back(format_double(s.v));
        extra.push_back(format_double(s.w));
      }
    }
    row.insert(row.end(), extra.begin(), extra.end());
    any_note = any_note || !note.empty();
    rows.push_back(std::move(row));
    notes.push_back(std::move(note));
  }

  if (any_note) header.push_back("note");
  auto write_row = [&](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out << ',';
      out << cells[k];
    }
  };
  write_row(header);
  out << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    write_row(rows[i]);
    if (any_note) {
      // Notes never contain commas or quotes, so they need no CSV escaping.
      out << ',' << notes[i];
    }
    out << '\n';
  }
}

inline std::string run_figure(const FigureConfig& cfg) {
  std::ostringstream out;
  run_figure(cfg, out);
  return out.str();
}

// ---------------------------------------------------------------------------
// Verification matrix

enum class VerifyProfile { standard, fock, all };

struct VerifyOptions {
  VerifyProfile profile = VerifyProfile::standard;
  double t_max = 20.0;
  double h = 1e-3;
  double tolerance = 1e-7;

  double fock_t_max = 3.0;
  double fock_h = 1e-3;
  int fock_cutoff = 25;
  std::size_t fock_audit_every = 1;
  double fock_floor = 1e-4;
  double fock_tail_factor = 10.0;
  double fock_tail_threshold = 1e-6;
  double trace_tolerance = 1e-8;
  double herm_tolerance = 1e-10;
  double vanishing_tolerance = 1e-10;

  /// Optional perturbation of the ODE constants (negative controls).
  std::function<DriftDiffusion(DriftDiffusion)> drift_override;
};

struct VerificationCase {
  std::string name;
  std::string pair;          ///< "analytic-ode" or "ode-fock"
  double max_deviation = 0.0;
  double tolerance = 0.0;    ///< effective bound at the worst sample
  double max_tail_mass = 0.0;
  double max_trace_defect = 0.0;
  double max_herm_defect = 0.0;
  double max_vanishing = 0.0;
  bool truncation_suspect = false;
  bool passed = false;
  std::string failure;
};

struct VerificationReport {
  std::vector<VerificationCase> cases;

  bool passed() const {
    return std::all_of(cases.begin(), cases.end(),
                       [](const VerificationCase& c) { return c.passed; });
  }

  double max_deviation(const std::string& pair) const {
    double m = 0.0;
    for (const auto& c : cases)
      if (c.pair == pair) m = std::max(m, c.max_deviation);
    return m;
  }

  std::string text() const {
    std::ostringstream out;
    std::size_t failed = 0;
    bool has_pair[2] = {false, false};
    for (const auto& c : cases) {
      char line[512];
      std::snprintf(line, sizeof line, "%s %-32s %-12s max_dev=%.3e tol=%.3e",
                    c.passed ? "PASS" : "FAIL", c.name.c_str(), c.pair.c_str(),
                    c.max_deviation, c.tolerance);
      out << line;
      if (c.pair == "ode-fock") {
        std::snprintf(line, sizeof line,
                      " tail=%.3e trace=%.3e herm=%.3e vanishing=%.3e%s",
                      c.max_tail_mass, c.max_trace_defect, c.max_herm_defect,
                      c.max_vanishing,
                      c.truncation_suspect ? " TRUNCATION-SUSPECT" : "");
        out << line;
        has_pair[1] = true;
      } else {
        has_pair[0] = true;
      }
      if (!c.failure.empty()) out << " (" << c.failure << ")";
      out << '\n';
      if (!c.passed) ++failed;
    }
    out << "cases=" << cases.size() << '\n';
    out << "failed=" << failed << '\n';
    if (has_pair[0])
      out << "max_deviation_analytic_ode=" << format_double(max_deviation("analytic-ode"))
          << '\n';
    if (has_pair[1])
      out << "max_deviation_ode_fock=" << format_double(max_deviation("ode-fock"))
          << '\n';
    out << "status=" << (passed() ? "PASS" : "FAIL") << '\n';
    return out.str();
  }
};

namespace detail {

inline MomentTrajectory ode_run(const ModelParams& p, double t_max, double h,
                                const VerifyOptions& opt) {
  require_oracle_params(p);
  DriftDiffusion d = drift_diffusion(p);
  if (opt.drift_override) d = opt.drift_override(d);
  return integrate(d, {p.nbar_a, p.nbar_b, 0.0}, t_max, h);
}

inline double moment_deviation(const MomentState& x, double u, double v, double w) {
  return std::max({std::abs(x.u - u), std::abs(x.v - v), std::abs(x.w - w)});
}

}  // namespace detail

inline VerificationCase verify_analytic_ode(const std::string& name,
                                            const ModelParams& p,
                                            const VerifyOptions& opt) {
  VerificationCase c;
  c.name = name;
  c.pair = "analytic-ode";
  c.tolerance = opt.tolerance;
  try {
    const auto ode = detail::ode_run(p, opt.t_max, opt.h, opt);
    for (const auto& s : ode.points) {
      const MomentState a = moments(p, s.time.value());
      const double dev = detail::moment_deviation(a, s.u, s.v, s.w);
      // NaN deviations must count as failures.
      if (!(dev <= c.max_deviation)) c.max_deviation = std::isnan(dev) ? INFINITY : dev;
    }
    c.passed = c.max_deviation <= opt.tolerance;
  } catch (const std::exception& e) {
    c.failure = e.what();
    c.passed = false;
  }
  return c;
}

inline VerificationCase verify_ode_fock(const std::string& name,
                                        const ModelParams& p,
                                        const VerifyOptions& opt) {
  VerificationCase c;
  c.name = name;
  c.pair = "ode-fock";
  try {
    const auto ode = detail::ode_run(p, opt.fock_t_max, opt.fock_h, opt);
    FockState rho = thermal_product_state(p.nbar_a, p.nbar_b, opt.fock_cutoff,
                                          opt.fock_cutoff);
    FockOptions fo;
    fo.tail_threshold = opt.fock_tail_threshold;
    fo.audit_every = opt.fock_audit_every;
    const FockRun run = evolve(rho, p, opt.fock_t_max, opt.fock_h, fo);
    if (run.samples.size() != ode.points.size())
      throw std::logic_error("ode and fock grids differ");

    bool within = true;
    double worst_excess = -INFINITY;
    for (std::size_t i = 0; i < run.samples.size(); ++i) {
      const FockSample& f = run.samples[i];
      const double dev = detail::moment_deviation(ode.points[i], f.moments.u,
                                                  f.moments.v, f.moments.ab.real());
      const double bound = std::max(opt.fock_floor, opt.fock_tail_factor * f.tail_mass);
      if (!(dev <= bound)) within = false;
      if (dev - bound > worst_excess) {
        worst_excess = dev - bound;
        c.tolerance = bound;
      }
      c.max_deviation = std::max(c.max_deviation, dev);
      const auto& m = f.moments;
      c.max_vanishing = std::max({c.max_vanishing, std::abs(m.a), std::abs(m.b),
                                  std::abs(m.a2), std::abs(m.b2),
                                  std::abs(m.adag_b), std::abs(m.ab.imag())});
    }
    c.max_tail_mass = run.max_tail_mass;
    c.max_trace_defect = run.max_trace_defect;
    c.max_herm_defect = run.max_herm_defect;
    c.truncation_suspect = run.truncation_suspect;

    std::vector<std::string> why;
    if (!within) why.emplace_back("moment deviation above bound");
    if (!(c.max_trace_defect <= opt.trace_tolerance)) why.emplace_back("trace defect");
    if (!(c.max_herm_defect <= opt.herm_tolerance)) why.emplace_back("hermiticity defect");
    if (!(c.max_vanishing <= opt.vanishing_tolerance)) why.emplace_back("nonzero vanishing moment");
    for (const auto& w : why) c.failure += (c.failure.empty() ? "" : ", ") + w;
    c.passed = why.empty();
  } catch (const std::exception& e) {
    c.failure = e.what();
    c.passed = false;
  }
  return c;
}

/// Parameter sets of every curve of every figure, labelled figNN:<curve>.
inline std::vector<std::pair<std::string, ModelParams>> figure_parameter_sets() {
  std::vector<std::pair<std::string, ModelParams>> sets;
  for (int id = 1; id <= kFigureCount; ++id) {
    const FigureConfig cfg = figure_config(id);
    for (double value : cfg.values) {
      char prefix[8];
      std::snprintf(prefix, sizeof prefix, "fig%02d:", id);
      sets.emplace_back(prefix + curve_label(cfg.swept, value), curve_params(cfg, value));
    }
  }
  return sets;
}

/// Small-A regimes where the truncated Fock evolution is trustworthy.
inline std::vector<std::pair<std::string, ModelParams>> fock_parameter_sets() {
  std::vector<std::pair<std::string, ModelParams>> sets;
  for (double nbar : {0.0, 1.0}) {
    ModelParams p{1.0, 0.5, 0.0, nbar, nbar};
    sets.emplace_back("A=1:" + curve_label(SweptParam::nbar, nbar), p);
  }
  return sets;
}

inline VerificationReport verify_all(const VerifyOptions& opt = {}) {
  VerificationReport report;
  if (opt.profile != VerifyProfile::fock)
    for (const auto& [name, p] : figure_parameter_sets())
      report.cases.push_back(verify_analytic_ode(name, p, opt));
  if (opt.profile != VerifyProfile::standard)
    for (const auto& [name, p] : fock_parameter_sets())
      report.cases.push_back(verify_ode_fock(name, p, opt));
  return report;
}

}  // namespace celsim
