#include "o3v/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>

#include "o3v/errors.hpp"

namespace o3v {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

// Typed access to one JSON object; every key not in `allowed` is rejected.
class Obj {
 public:
  Obj(const json& j, std::string ptr, std::initializer_list<const char*> allowed) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) fail("expected an object", ptr_);
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || it.key() == a;
      if (!ok) fail("unknown key '" + it.key() + "'", at(it.key()));
    }
  }

  [[noreturn]] static void fail(const std::string& what, const std::string& ptr) { throw ConfigError(what, ptr); }

  std::string at(const std::string& key) const { return ptr_ + "/" + escape_token(key); }
  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& raw(const char* key) const { return j_.at(key); }

  double number(const char* key, double def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number()) fail("expected a number", at(key));
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail("expected a finite number", at(key));
    return x;
  }
  double positive(const char* key, double def) const {
    const double x = number(key, def);
    if (!(x > 0.0)) fail("expected a positive number", at(key));
    return x;
  }
  std::optional<double> optional_positive(const char* key) const {
    if (!has(key)) return std::nullopt;
    return positive(key, 1.0);
  }
  long long integer(const char* key, long long def, long long lo, long long hi) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail("expected an integer", at(key));
    const long long x = v.get<long long>();
    if (x < lo || x > hi) {
      fail("integer out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]", at(key));
    }
    return x;
  }
  bool boolean(const char* key, bool def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_boolean()) fail("expected true or false", at(key));
    return v.get<bool>();
  }
  std::string string(const char* key, const std::string& def, std::initializer_list<const char*> choices = {}) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_string()) fail("expected a string", at(key));
    std::string s = v.get<std::string>();
    if (choices.size() > 0) {
      bool ok = false;
      std::string list;
      for (const char* c : choices) {
        ok = ok || s == c;
        list += list.empty() ? c : std::string(", ") + c;
      }
      if (!ok) fail("expected one of " + list, at(key));
    }
    return s;
  }
  std::vector<double> numbers(const char* key, std::size_t exact_size = 0) const {
    const json& v = j_.at(key);
    if (!v.is_array()) fail("expected an array", at(key));
    if (exact_size && v.size() != exact_size) {
      fail("expected an array of " + std::to_string(exact_size) + " numbers", at(key));
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const std::string p = at(key) + "/" + std::to_string(k);
      if (!v[k].is_number()) fail("expected a number", p);
      out.push_back(v[k].get<double>());
      if (!std::isfinite(out.back())) fail("expected a finite number", p);
    }
    return out;
  }

 private:
  const json& j_;
  std::string ptr_;
};

SourceOrientation orientation_of(const Obj& o, const char* key) {
  return o.string(key, "negative", {"negative", "positive"}) == "positive" ? SourceOrientation::PositiveVortex
                                                                            : SourceOrientation::NegativeVortex;
}

void parse_tolerances(const Obj& o, ExperimentConfig& c) {
  c.newton.tol_factor = o.positive("newton_tol_factor", c.newton.tol_factor);
  c.newton.scale = o.positive("newton_scale", c.newton.scale);
  c.newton.max_iterations = static_cast<int>(o.integer("newton_max_iterations", c.newton.max_iterations, 1, 100000));
  c.newton.linear_rtol = o.positive("linear_rtol", c.newton.linear_rtol);
  c.newton.max_linear = static_cast<int>(o.integer("max_linear", c.newton.max_linear, 1, 10000000));
  c.newton.max_growth = static_cast<int>(o.integer("max_growth", c.newton.max_growth, 1, 1000));
  c.monotone.tol_factor = o.positive("monotone_tol_factor", c.monotone.tol_factor);
  c.monotone.max_iterations =
      static_cast<int>(o.integer("monotone_max_iterations", c.monotone.max_iterations, 1, 100000000));
  c.monotone.ordering_slack = o.number("ordering_slack", c.monotone.ordering_slack);
  if (c.monotone.ordering_slack < 0.0) Obj::fail("expected a nonnegative number", o.at("ordering_slack"));
  c.eigen.tol = o.positive("eigen_tol", c.eigen.tol);
  c.eigen.max_iterations = static_cast<int>(o.integer("eigen_max_iterations", c.eigen.max_iterations, 1, 1000000));
}

}  // namespace

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
  ExperimentConfig c;
  const Obj top(j, "",
                {"periods", "grid", "tau", "nonlinearity", "epsilon", "epsilon_schedule", "vortices", "solver",
                 "tolerances", "continuation", "monotone", "shooter", "sweep", "stability", "verify", "output",
                 "seed"});

  double L1 = c.domain.L1(), L2 = c.domain.L2();
  int n1 = c.domain.n1(), n2 = c.domain.n2();
  if (top.has("periods")) {
    const auto p = top.numbers("periods", 2);
    for (int k = 0; k < 2; ++k) {
      if (!(p[k] > 0.0)) Obj::fail("periods must be positive", "/periods/" + std::to_string(k));
    }
    L1 = p[0];
    L2 = p[1];
  }
  if (top.has("grid")) {
    const json& g = top.raw("grid");
    if (!g.is_array() || g.size() != 2) Obj::fail("expected an array of 2 integers", "/grid");
    for (int k = 0; k < 2; ++k) {
      if (!g[k].is_number_integer() || g[k].get<long long>() < 4 || g[k].get<long long>() > 65536 ||
          g[k].get<long long>() % 2 != 0) {
        Obj::fail("grid sizes must be even integers in [4, 65536]", "/grid/" + std::to_string(k));
      }
    }
    n1 = g[0].get<int>();
    n2 = g[1].get<int>();
  }
  c.domain = TorusDomain(L1, L2, n1, n2);
  c.tau = top.positive("tau", c.tau);
  c.nonlinearity =
      nonlinearity_from_string(top.string("nonlinearity", "sigma_o3", {"sigma_o3", "csh"}));

  if (top.has("epsilon") && top.has("epsilon_schedule")) {
    Obj::fail("give either epsilon or epsilon_schedule, not both", "/epsilon_schedule");
  }
  c.epsilon = top.optional_positive("epsilon");
  if (top.has("epsilon_schedule")) {
    c.epsilon_schedule = top.numbers("epsilon_schedule");
    if (c.epsilon_schedule.empty()) Obj::fail("expected a non-empty array", "/epsilon_schedule");
    for (std::size_t k = 0; k < c.epsilon_schedule.size(); ++k) {
      if (!(c.epsilon_schedule[k] > 0.0)) Obj::fail("epsilons must be positive", "/epsilon_schedule/" + std::to_string(k));
    }
  }

  if (top.has("vortices")) {
    const json& vs = top.raw("vortices");
    if (!vs.is_array()) Obj::fail("expected an array", "/vortices");
    for (std::size_t k = 0; k < vs.size(); ++k) {
      const std::string p = "/vortices/" + std::to_string(k);
      const Obj v(vs[k], p, {"x", "y", "m", "sign"});
      for (const char* req : {"x", "y"}) {
        if (!v.has(req)) Obj::fail(std::string("missing '") + req + "'", p + "/" + req);
      }
      const double x = v.number("x", 0.0), y = v.number("y", 0.0);
      if (x < 0.0 || x >= L1) Obj::fail("x must lie in [0, L1)", p + "/x");
      if (y < 0.0 || y >= L2) Obj::fail("y must lie in [0, L2)", p + "/y");
      const int m = static_cast<int>(v.integer("m", 1, 1, 1000));
      const long long sign = v.integer("sign", 1, -1, 1);
      if (sign == 0) Obj::fail("sign must be +1 or -1", p + "/sign");
      if (sign > 0) {
        c.vortices.add_positive({x, y}, m);
      } else {
        c.vortices.add_negative({x, y}, m);
      }
    }
    try {
      c.vortices.validate(L1, L2);
    } catch (const GeometryError& e) {
      Obj::fail(e.what(), "/vortices");
    }
  }

  c.solver = top.string("solver", c.solver, {"newton", "monotone"});
  if (top.has("tolerances")) {
    parse_tolerances(Obj(top.raw("tolerances"), "/tolerances",
                         {"newton_tol_factor", "newton_scale", "newton_max_iterations", "linear_rtol", "max_linear",
                          "max_growth", "monotone_tol_factor", "monotone_max_iterations", "ordering_slack",
                          "eigen_tol", "eigen_max_iterations"}),
                     c);
  }
  if (top.has("continuation")) {
    const Obj o(top.raw("continuation"), "/continuation", {"enabled", "eps0", "ratio"});
    c.continuation = o.boolean("enabled", c.continuation);
    c.eps0 = o.positive("eps0", c.eps0);
    c.ratio = o.positive("ratio", c.ratio);
    if (!(c.ratio < 1.0)) Obj::fail("ratio must lie in (0, 1)", "/continuation/ratio");
  }
  if (top.has("monotone")) {
    const Obj o(top.raw("monotone"), "/monotone", {"sub", "super_sigma"});
    c.monotone_sub = o.number("sub", c.monotone_sub);
    c.monotone_super_sigma = o.optional_positive("super_sigma");
  }
  if (top.has("shooter")) {
    const Obj o(top.raw("shooter"), "/shooter",
                {"tau", "s", "nu", "orientation", "find_topological", "r_max", "tol", "s_min", "s_max", "n"});
    ShooterSettings& s = c.shooter;
    s.tau = o.positive("tau", s.tau);
    s.s = o.number("s", s.s);
    s.nu = o.number("nu", s.nu);
    if (s.nu < 0.0) Obj::fail("nu must be nonnegative", "/shooter/nu");
    s.orientation = orientation_of(o, "orientation");
    s.find_topological = o.boolean("find_topological", s.find_topological);
    s.r_max = o.positive("r_max", s.r_max);
    s.tol = o.positive("tol", s.tol);
    s.s_min = o.number("s_min", s.s_min);
    s.s_max = o.number("s_max", s.s_max);
    if (s.s_min > s.s_max) Obj::fail("s_min exceeds s_max", "/shooter/s_min");
    s.n = static_cast<int>(o.integer("n", s.n, 1, 100000));
  }
  if (top.has("sweep")) {
    const Obj o(top.raw("sweep"), "/sweep",
                {"epsilon_max", "epsilon_min", "steps", "epsilons", "K_radius", "ball_radius", "eigen"});
    SweepSettings& s = c.sweep;
    s.epsilon_max = o.positive("epsilon_max", s.epsilon_max);
    s.epsilon_min = o.positive("epsilon_min", s.epsilon_min);
    if (s.epsilon_min > s.epsilon_max) Obj::fail("epsilon_min exceeds epsilon_max", "/sweep/epsilon_min");
    s.steps = static_cast<int>(o.integer("steps", s.steps, 1, 10000));
    if (o.has("epsilons")) {
      s.epsilons = o.numbers("epsilons");
      for (std::size_t k = 0; k < s.epsilons.size(); ++k) {
        if (!(s.epsilons[k] > 0.0) || (k > 0 && !(s.epsilons[k] < s.epsilons[k - 1]))) {
          Obj::fail("epsilons must be positive and strictly decreasing", "/sweep/epsilons/" + std::to_string(k));
        }
      }
    }
    s.K_radius = o.positive("K_radius", s.K_radius);
    s.ball_radius = o.positive("ball_radius", s.ball_radius);
    s.eigen = o.boolean("eigen", s.eigen);
  }
  if (top.has("stability")) {
    const Obj o(top.raw("stability"), "/stability",
                {"target", "margin", "s", "nu", "tau", "orientation", "r_max", "tol"});
    StabilitySettings& s = c.stability;
    s.target = o.string("target", "torus", {"torus", "radial"}) == "radial" ? StabilitySettings::Target::Radial
                                                                             : StabilitySettings::Target::Torus;
    if (o.has("margin")) {
      s.margin = o.number("margin", 0.0);
      if (*s.margin < 0.0) Obj::fail("margin must be nonnegative", "/stability/margin");
    }
    s.s = o.number("s", s.s);
    s.nu = o.number("nu", s.nu);
    if (s.nu < 0.0) Obj::fail("nu must be nonnegative", "/stability/nu");
    s.tau = o.positive("tau", s.tau);
    s.orientation = orientation_of(o, "orientation");
    s.r_max = o.positive("r_max", s.r_max);
    s.tol = o.positive("tol", s.tol);
  }
  if (top.has("verify")) {
    const Obj o(top.raw("verify"), "/verify",
                {"field", "a_values", "ball_radius", "residual_factor", "mass_tol", "identity_tol", "pohozaev_tol",
                 "quantization_tol"});
    VerifySettings& s = c.verify;
    if (o.has("field")) {
      const fs::path p = o.string("field", "");
      s.field = p.is_absolute() ? p : base_dir / p;
    }
    if (o.has("a_values")) {
      s.a_values = o.numbers("a_values");
      for (std::size_t k = 0; k < s.a_values.size(); ++k) {
        if (!(s.a_values[k] > 0.0)) Obj::fail("a must be positive", "/verify/a_values/" + std::to_string(k));
      }
    }
    s.ball_radius = o.positive("ball_radius", s.ball_radius);
    s.residual_factor = o.positive("residual_factor", s.residual_factor);
    s.mass_tol = o.positive("mass_tol", s.mass_tol);
    s.identity_tol = o.positive("identity_tol", s.identity_tol);
    s.pohozaev_tol = o.positive("pohozaev_tol", s.pohozaev_tol);
    s.quantization_tol = o.positive("quantization_tol", s.quantization_tol);
  }
  if (top.has("output")) {
    const Obj o(top.raw("output"), "/output", {"dir", "prefix", "export_field", "slice_row"});
    OutputSettings& s = c.output;
    const fs::path dir = o.string("dir", ".");
    s.dir = dir.is_absolute() ? dir : base_dir / dir;
    s.prefix = o.string("prefix", s.prefix);
    if (s.prefix.empty() || s.prefix.find('/') != std::string::npos) {
      Obj::fail("prefix must be a non-empty file name", "/output/prefix");
    }
    s.export_field = o.boolean("export_field", s.export_field);
    if (o.has("slice_row")) s.slice_row = static_cast<int>(o.integer("slice_row", 0, 0, n1 - 1));
  } else {
    c.output.dir = base_dir;
  }
  c.seed = static_cast<std::uint64_t>(top.integer("seed", 0, 0, std::numeric_limits<long long>::max()));
  return c;
}

double ExperimentConfig::target_epsilon() const {
  if (!epsilon_schedule.empty()) return epsilon_schedule.back();
  if (epsilon) return *epsilon;
  throw ConfigError("a torus solve needs epsilon or epsilon_schedule", "/epsilon");
}

std::vector<double> ExperimentConfig::solve_schedule() const {
  if (!epsilon_schedule.empty()) return epsilon_schedule;
  const double e = target_epsilon();
  if (continuation && e < eps0) return continuation_schedule(e, eps0, ratio);
  return {e};
}

std::vector<double> ExperimentConfig::sweep_epsilons() const {
  if (!sweep.epsilons.empty()) return sweep.epsilons;
  return geometric_epsilons(sweep.epsilon_max, sweep.epsilon_min, sweep.steps);
}

SweepConfig ExperimentConfig::sweep_config() const {
  SweepConfig s;
  s.domain = domain;
  s.vortices = vortices;
  s.tau = tau;
  s.nonlinearity = nonlinearity;
  s.newton = newton;
  s.eps0 = eps0;
  s.ratio = ratio;
  s.ball_radius = sweep.ball_radius;
  s.eigen = sweep.eigen;
  return s;
}

json load_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string(), "");
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what(), "");
  }
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value", "");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  std::string ptr;
  if (key.front() == '/') {
    ptr = key;
  } else {
    std::size_t start = 0;
    while (start <= key.size()) {
      const auto dot = key.find('.', start);
      const std::string tok = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      if (tok.empty()) throw ConfigError("override key '" + key + "' has an empty component", "");
      ptr += "/" + escape_token(tok);
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
  }
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  try {
    j[json::json_pointer(ptr)] = value;
  } catch (const json::exception& e) {
    throw ConfigError("override '" + assignment + "' cannot be applied: " + e.what(), ptr);
  }
}

TorusField solve_configured(const ExperimentConfig& cfg, MonotoneReport* report) {
  const double eps = cfg.target_epsilon();
  const ModelParams params(cfg.tau, eps, cfg.nonlinearity);
  if (cfg.solver == "newton") {
    return solve_newton(cfg.domain, cfg.vortices, params, nullptr, cfg.solve_schedule(), cfg.newton);
  }
  const Grid sub(cfg.domain, cfg.monotone_sub);
  const Grid super = smoothed_supersolution(cfg.domain, cfg.vortices, cfg.monotone_super_sigma.value_or(eps / 2));
  return solve_monotone(cfg.domain, cfg.vortices, params, sub, super, cfg.monotone, report);
}

}  // namespace o3v
