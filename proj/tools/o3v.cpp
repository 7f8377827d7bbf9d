// o3v: command-line front end for the radial shooter, the torus solvers,
// the stability analysis and the epsilon sweeps.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "o3v/asymptotics.hpp"
#include "o3v/config.hpp"
#include "o3v/errors.hpp"
#include "o3v/io.hpp"
#include "o3v/radial.hpp"
#include "o3v/stability.hpp"
#include "o3v/torus.hpp"

namespace fs = std::filesystem;
using o3v::io::format_number;
using json = o3v::io::json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kVerification = 3 };

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;
  bool json = false;
};

o3v::ExperimentConfig load_config(const ConfigArgs& a) {
  nlohmann::json j = o3v::load_json(a.path);
  for (const auto& o : a.overrides) o3v::apply_override(j, o);
  return o3v::parse_config(j, fs::path(a.path).parent_path());
}

fs::path output_path(const o3v::ExperimentConfig& c, const std::string& suffix) {
  return c.output.dir / (c.output.prefix + suffix);
}

void print(bool as_json, const json& summary, const std::string& text) {
  if (as_json) {
    std::cout << o3v::io::dump_json(summary);
  } else {
    std::cout << text;
  }
}

std::string line(const std::string& key, const std::string& value) {
  std::string k = key + ":";
  k.resize(std::max<std::size_t>(k.size(), 18), ' ');
  return k + value + "\n";
}

// ---------------------------------------------------------------- shoot

struct ShootArgs {
  double tau = 0.0;
  std::optional<double> s;
  bool find_topological = false;
  double nu = 0.0;
  std::string orientation = "negative";
  double r_max = 1e6;
  double tol = 1e-10;
  std::string out;
  std::string summary;
  bool json = false;
};

int cmd_shoot(const ShootArgs& a) {
  if (!a.s && !a.find_topological) {
    std::cerr << "shoot: give --s or --find-topological\n";
    return kUsage;
  }
  o3v::RadialOptions opts;
  opts.orientation = a.orientation == "positive" ? o3v::SourceOrientation::PositiveVortex
                                                 : o3v::SourceOrientation::NegativeVortex;
  o3v::RadialSolution sol;
  if (a.find_topological) {
    o3v::TopologicalOptions t;
    t.radial = opts;
    t.r_max = a.r_max;
    t.tol = a.tol;
    sol = o3v::find_topological(a.nu, a.tau, std::nullopt, t);
  } else {
    sol = o3v::integrate_radial(*a.s, a.nu, a.tau, a.r_max, a.tol, opts);
  }
  json summary = o3v::io::to_json(sol);
  if (!a.out.empty()) {
    o3v::io::write_atomic(a.out, o3v::io::profile_csv(sol));
    summary["profile"] = a.out;
  }
  if (!a.summary.empty()) o3v::io::write_atomic(a.summary, o3v::io::dump_json(summary));
  std::string text = line("s", format_number(sol.s)) + line("beta", format_number(sol.beta)) +
                     line("bc_type", o3v::to_string(sol.bc_type)) + line("samples", std::to_string(sol.grid.size()));
  for (const auto& w : sol.warnings) text += line("warning", w);
  print(a.json, summary, text);
  return kOk;
}

// ----------------------------------------------------------- beta-curve

struct CurveArgs {
  double tau = 0.0;
  double s_min = 0.0;
  double s_max = 0.0;
  int n = 0;
  double r_max = 1e6;
  double tol = 1e-10;
  std::string out;
  bool strict = false;
  bool json = false;
};

int cmd_beta_curve(const CurveArgs& a) {
  if (a.n < 1) {
    std::cerr << "beta-curve: --n must be at least 1\n";
    return kUsage;
  }
  if (a.s_min > a.s_max) {
    std::cerr << "beta-curve: --s-min exceeds --s-max\n";
    return kUsage;
  }
  std::vector<double> s(a.n);
  for (int k = 0; k < a.n; ++k) s[k] = a.n == 1 ? a.s_min : a.s_min + (a.s_max - a.s_min) * k / (a.n - 1);
  const o3v::BetaCurve curve = o3v::compute_beta_curve(a.tau, s, a.r_max, a.tol);
  if (!a.out.empty()) o3v::io::write_atomic(a.out, o3v::io::beta_curve_csv(curve));

  json summary = o3v::io::to_json(curve);
  int failed = summary["failed"].get<int>();
  std::string text = "s,beta,bc_type\n";
  for (const auto& p : curve.samples) {
    text += format_number(p.s) + "," + (p.failed ? "nan" : format_number(p.beta)) + "," +
            (p.failed ? "Failed" : o3v::to_string(p.bc_type)) + "\n";
  }
  text += line("monotone_violations", std::to_string(curve.monotone_violations));
  text += line("failed", std::to_string(failed));
  print(a.json, summary, text);
  return a.strict && failed > 0 ? kNumerical : kOk;
}

// ---------------------------------------------------------------- torus

int cmd_torus(const ConfigArgs& a) {
  const o3v::ExperimentConfig cfg = load_config(a);
  o3v::MonotoneReport report;
  const o3v::TorusField field = o3v::solve_configured(cfg, &report);
  json summary = o3v::io::to_json(field);
  summary["seed"] = cfg.seed;
  if (cfg.solver == "monotone") {
    summary["monotone"] = {{"shift", report.shift},
                           {"sub_violations", report.sub_check.violations},
                           {"super_violations", report.super_check.violations}};
  }
  if (cfg.output.export_field) {
    o3v::io::export_field(field, output_path(cfg, "_field"));
    summary["field"] = output_path(cfg, "_field.json").string();
  }
  if (cfg.output.slice_row) {
    o3v::io::write_atomic(output_path(cfg, "_slice.csv"), o3v::io::field_slice_csv(field, *cfg.output.slice_row));
  }
  o3v::io::write_atomic(output_path(cfg, "_torus.json"), o3v::io::dump_json(summary));

  std::string text = line("method", field.method) + line("epsilon", format_number(field.params.epsilon())) +
                     line("iterations", std::to_string(field.iterations)) +
                     line("residual_norm", format_number(field.residual_norm)) +
                     line("tolerance", format_number(field.tolerance)) +
                     line("total_mass", format_number(summary["total_mass"].get<double>())) +
                     line("expected_mass", format_number(summary["expected_mass"].get<double>()));
  for (const auto& w : field.warnings) text += line("warning", w);
  print(a.json, summary, text);
  return kOk;
}

// ------------------------------------------------------------ stability

int cmd_stability(const ConfigArgs& a) {
  const o3v::ExperimentConfig cfg = load_config(a);
  const auto& st = cfg.stability;
  json summary;
  o3v::EigenResult eig;
  double margin = 0.0;
  if (st.target == o3v::StabilitySettings::Target::Radial) {
    o3v::RadialOptions opts;
    opts.orientation = st.orientation;
    opts.nonlinearity = cfg.nonlinearity;
    const o3v::RadialSolution sol = o3v::integrate_radial(st.s, st.nu, st.tau, st.r_max, st.tol, opts);
    eig = o3v::weighted_eigen_radial(sol);
    margin = st.margin.value_or(o3v::default_margin(1.0));
    summary["target"] = "radial";
    summary["profile"] = o3v::io::to_json(sol);
  } else {
    const o3v::TorusField field = o3v::solve_configured(cfg);
    eig = o3v::principal_eigen_torus(field, cfg.eigen);
    margin = st.margin.value_or(o3v::default_margin(field.params.epsilon()));
    summary["target"] = "torus";
    summary["field"] = o3v::io::to_json(field);
  }
  const o3v::Stability cls = o3v::classify_stability(eig, margin);
  summary["eigen"] = o3v::io::to_json(eig);
  summary["margin"] = margin;
  summary["classification"] = o3v::to_string(cls);
  summary["seed"] = cfg.seed;
  o3v::io::write_atomic(output_path(cfg, "_stability.json"), o3v::io::dump_json(summary));

  std::string text = line("target", summary["target"].get<std::string>()) +
                     line("eigenvalue", format_number(eig.eigenvalue)) +
                     line("residual_norm", format_number(eig.residual_norm)) +
                     line("sensitivity", eig.sensitivity ? format_number(*eig.sensitivity) : "n/a") +
                     line("reliable", eig.reliable ? "yes" : "no") + line("margin", format_number(margin)) +
                     line("classification", o3v::to_string(cls));
  for (const auto& w : eig.warnings) text += line("warning", w);
  print(a.json, summary, text);
  return kOk;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const ConfigArgs& a) {
  const o3v::ExperimentConfig cfg = load_config(a);
  const auto eps = cfg.sweep_epsilons();
  const auto records = o3v::run_sweep(cfg.sweep_config(), eps, cfg.sweep.K_radius);
  const o3v::AlternativeVerdict verdict = o3v::classify_alternative(records);

  json summary;
  summary["verdict"] = o3v::io::to_json(verdict);
  summary["K_radius"] = cfg.sweep.K_radius;
  summary["ball_radius"] = cfg.sweep.ball_radius;
  summary["seed"] = cfg.seed;
  json recs = json::array();
  for (const auto& r : records) recs.push_back(o3v::io::to_json(r));
  summary["records"] = recs;
  o3v::io::write_atomic(output_path(cfg, "_sweep.csv"), o3v::io::sweep_csv(records));
  o3v::io::write_atomic(output_path(cfg, "_verdict.json"), o3v::io::dump_json(summary));

  std::string text = "epsilon,sup_K,inf_K,total_abs_mass,stability\n";
  for (const auto& r : records) {
    text += format_number(r.epsilon) + "," + format_number(r.sup_K) + "," + format_number(r.inf_K) + "," +
            format_number(r.total_abs_mass) + "," + (r.stability ? o3v::to_string(*r.stability) : "-") + "\n";
  }
  text += line("verdict", o3v::to_string(verdict.kind));
  text += line("decay_test", !verdict.decay.applicable ? "not applicable" : verdict.decay.passed ? "passed" : "failed");
  text += line("evidence", verdict.evidence);
  print(a.json, summary, text);
  return kOk;
}

// --------------------------------------------------------------- verify

struct Check {
  std::string name;
  double value;
  double tol;
  bool pass;
  std::string note;
};

int cmd_verify(const ConfigArgs& a) {
  const o3v::ExperimentConfig cfg = load_config(a);
  const auto& vs = cfg.verify;
  const o3v::TorusField field = vs.field ? o3v::io::import_field(*vs.field) : o3v::solve_configured(cfg);

  std::vector<Check> checks;
  const double res_tol = vs.residual_factor * field.tolerance;
  checks.push_back({"residual", field.residual_norm, res_tol, field.residual_norm <= res_tol, ""});

  const int n1 = field.vortices.N1(), n2 = field.vortices.N2();
  const double expected = 4.0 * M_PI * (n1 - n2);
  const double mass_err = std::abs(o3v::total_mass(field) - expected) / (4.0 * M_PI * std::max(1, std::abs(n1 - n2)));
  checks.push_back({"total_mass", mass_err, vs.mass_tol, mass_err <= vs.mass_tol, ""});

  if (field.params.nonlinearity() == o3v::Nonlinearity::SigmaO3) {
    for (double av : vs.a_values) {
      const o3v::IdentityResult r = o3v::identity_check(field, av);
      checks.push_back({"identity a=" + format_number(av), r.rel_err, vs.identity_tol, r.rel_err < vs.identity_tol, ""});
    }
  }
  const double tau = field.params.tau();
  for (std::size_t id = 0; id < field.vortices.size(); ++id) {
    int sign = 0;
    const int m = field.vortices.at(id, &sign).multiplicity;
    const std::string tag = "[" + std::to_string(id) + "]";
    try {
      const o3v::PohozaevValue p = o3v::pohozaev_value(field, id, vs.ball_radius);
      checks.push_back({"pohozaev" + tag, p.residual, vs.pohozaev_tol, p.residual < vs.pohozaev_tol, ""});
      if (field.params.nonlinearity() == o3v::Nonlinearity::SigmaO3) {
        const double q = o3v::quantization_value(field, id, vs.ball_radius);
        const double target = 4.0 * (tau + 1.0) * M_PI * m * m;
        const double rel = std::abs(q - target) / target;
        checks.push_back({"quantization" + tag, rel, vs.quantization_tol, rel < vs.quantization_tol, ""});
      }
    } catch (const o3v::GeometryError& e) {
      checks.push_back({"pohozaev" + tag, NAN, vs.pohozaev_tol, true, std::string("skipped: ") + e.what()});
    }
  }

  bool all = true;
  json rows = json::array();
  std::string text = "result  check                value                    tolerance\n";
  for (const auto& c : checks) {
    all = all && c.pass;
    json r{{"check", c.name}, {"value", c.value}, {"tolerance", c.tol}, {"pass", c.pass}};
    if (!c.note.empty()) r["note"] = c.note;
    rows.push_back(r);
    std::string name = c.name;
    name.resize(std::max<std::size_t>(name.size(), 20), ' ');
    std::string val = c.note.empty() ? format_number(c.value) : "-";
    val.resize(std::max<std::size_t>(val.size(), 24), ' ');
    text += std::string(c.pass ? "PASS" : "FAIL") + "    " + name + " " + val + " " + format_number(c.tol);
    if (!c.note.empty()) text += "  (" + c.note + ")";
    text += "\n";
  }
  text += all ? "all checks passed\n" : "verification FAILED\n";
  json summary{{"field", o3v::io::to_json(field)}, {"checks", rows}, {"passed", all}, {"seed", cfg.seed}};
  print(a.json, summary, text);
  return all ? kOk : kVerification;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const o3v::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const o3v::BracketError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const o3v::WeightIndefinite& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const o3v::ResolutionError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
}

void add_config_options(CLI::App* sub, ConfigArgs& a) {
  sub->add_option("--config", a.path, "experiment config JSON")->required()->check(CLI::ExistingFile);
  sub->add_option("--override", a.overrides, "key=value applied to the config before validation");
  sub->add_flag("--json", a.json, "machine-readable summary on stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vortex equation toolkit: radial shooting, torus solves, stability and epsilon sweeps"};
  app.require_subcommand(1);

  ShootArgs shoot;
  auto* s = app.add_subcommand("shoot", "integrate one radial profile");
  s->add_option("--tau", shoot.tau, "model parameter tau > 0")->required();
  auto* s_opt = s->add_option("--s", shoot.s, "initial height of the regular part");
  auto* topo = s->add_flag("--find-topological", shoot.find_topological, "bisect for the decaying profile");
  s_opt->excludes(topo);
  s->add_option("--nu", shoot.nu, "vortex multiplicity at the origin")->check(CLI::NonNegativeNumber);
  s->add_option("--orientation", shoot.orientation, "source sign at the origin")
      ->check(CLI::IsMember({"negative", "positive"}));
  s->add_option("--rmax", shoot.r_max, "outer radius");
  s->add_option("--tol", shoot.tol, "integrator tolerance");
  s->add_option("--out", shoot.out, "profile CSV (r,u,du_dr)");
  s->add_option("--summary", shoot.summary, "summary JSON file");
  s->add_flag("--json", shoot.json, "machine-readable summary on stdout");

  CurveArgs curve;
  auto* b = app.add_subcommand("beta-curve", "flux beta(s) over a range of initial heights");
  b->add_option("--tau", curve.tau, "model parameter tau > 0")->required();
  b->add_option("--s-min", curve.s_min, "first initial height")->required();
  b->add_option("--s-max", curve.s_max, "last initial height")->required();
  b->add_option("--n", curve.n, "number of samples")->required();
  b->add_option("--rmax", curve.r_max, "outer radius");
  b->add_option("--tol", curve.tol, "integrator tolerance");
  b->add_option("--out", curve.out, "curve CSV (s,beta,bc_type)");
  b->add_flag("--strict", curve.strict, "exit 2 when any sample fails");
  b->add_flag("--json", curve.json, "machine-readable summary on stdout");

  ConfigArgs torus, stab, sweep, verify;
  auto* t = app.add_subcommand("torus", "solve the doubly periodic problem");
  add_config_options(t, torus);
  auto* st = app.add_subcommand("stability", "principal eigenvalue and stability class");
  add_config_options(st, stab);
  auto* sw = app.add_subcommand("sweep", "epsilon sweep with alternative verdict");
  add_config_options(sw, sweep);
  auto* v = app.add_subcommand("verify", "identity battery on a solved or stored field");
  add_config_options(v, verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (s->parsed()) return guarded([&] { return cmd_shoot(shoot); });
  if (b->parsed()) return guarded([&] { return cmd_beta_curve(curve); });
  if (t->parsed()) return guarded([&] { return cmd_torus(torus); });
  if (st->parsed()) return guarded([&] { return cmd_stability(stab); });
  if (sw->parsed()) return guarded([&] { return cmd_sweep(sweep); });
  if (v->parsed()) return guarded([&] { return cmd_verify(verify); });
  return kUsage;
}
