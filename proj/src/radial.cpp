#include "o3v/radial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "o3v/errors.hpp"

namespace o3v {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kOverflowU = 1e4;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

using State = std::array<double, 2>;

enum class StopRule { Overflow, Diverging };

struct RawProfile {
  std::vector<double> v;
  std::vector<double> w;
  long steps = 0;
  long rejected = 0;
  bool stopped_early = false;
};

class RadialOde {
 public:
  RadialOde(const Kernel& k, double c) : kernel_(k), c_(c) {}

  // Returns false when the kernel cannot be evaluated (CSH overflow).
  bool operator()(double t, const State& y, State& dy) const {
    const double u = y[0] - 2.0 * c_ * t;
    double f;
    try {
      f = kernel_.f(u);
    } catch (const std::overflow_error&) {
      return false;
    }
    dy[0] = y[1];
    dy[1] = -std::exp(2.0 * t) * f;
    return true;
  }

  double u(double t, double v) const { return v - 2.0 * c_ * t; }
  double c() const { return c_; }

 private:
  Kernel kernel_;
  double c_;
};

State series_start(const Kernel& k, double s, double nu, double c, double r0) {
  if (nu == 0.0) {
    const double f = k.f(s);
    const double a2 = -f / 4.0;
    const double a4 = k.df(s) * f / 64.0;
    const double r2 = r0 * r0;
    return {s + a2 * r2 + a4 * r2 * r2, 2.0 * a2 * r2 + 4.0 * a4 * r2 * r2};
  }
  // f(u) ~ const * r^{2 nu} near the origin in both orientations.
  const double u0 = s - 2.0 * c * std::log(r0);
  const double w0 = -k.f(u0) * r0 * r0 / (2.0 + 2.0 * nu);
  return {s + w0 / (2.0 * nu + 2.0), w0};
}

bool should_stop(StopRule rule, double u, double ru) {
  if (!std::isfinite(u)) return true;
  if (std::abs(u) > kOverflowU) return true;
  if (rule == StopRule::Diverging) {
    // For u > 0, (r u')' = -r f(u) > 0, so u > 0 with u' > 0 never turns back;
    // symmetrically for u < 0.
    return u * ru > 0.0 && std::abs(u) > 1e-12;
  }
  return false;
}

RawProfile integrate_profile(const RadialOde& ode, State y, double t0, double dt_out, std::size_t n_out,
                             double tol, StopRule rule) {
  RawProfile out;
  out.v.reserve(n_out + 1);
  out.w.reserve(n_out + 1);
  out.v.push_back(y[0]);
  out.w.push_back(y[1]);

  double t = t0;
  double h = dt_out / 10.0;
  State k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, yt{}, ynew{};
  if (!ode(t, y, k1)) {
    out.stopped_early = true;
    return out;
  }

  for (std::size_t k = 1; k <= n_out; ++k) {
    const double t_next = t0 + static_cast<double>(k) * dt_out;
    while (t < t_next) {
      const bool landing = t + h >= t_next;
      const double hs = landing ? t_next - t : h;
      if (hs < 1e-13 * std::max(1.0, std::abs(t))) {
        throw IntegrationFailure("radial integrator: step size underflow", std::exp(t));
      }
      bool ok = true;
      auto stage = [&](double tc, State& kk, std::initializer_list<std::pair<double, const State*>> terms) {
        for (int i = 0; i < 2; ++i) {
          double acc = y[i];
          for (const auto& [a, ks] : terms) acc += hs * a * (*ks)[i];
          yt[i] = acc;
        }
        ok = ok && ode(tc, yt, kk);
      };
      stage(t + c2 * hs, k2, {{a21, &k1}});
      stage(t + c3 * hs, k3, {{a31, &k1}, {a32, &k2}});
      stage(t + c4 * hs, k4, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
      stage(t + c5 * hs, k5, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
      stage(t + hs, k6, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
      for (int i = 0; i < 2; ++i) {
        ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      }
      const double t_new = landing ? t_next : t + hs;
      ok = ok && ode(t_new, ynew, k7);
      if (!ok) {
        // Kernel overflow inside the step: the tail is diverging upward.
        out.stopped_early = true;
        return out;
      }
      double err = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double e = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / 2.0);
      if (!std::isfinite(err)) err = 1e10;
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        t = t_new;
        y = ynew;
        k1 = k7;
        ++out.steps;
        if (!landing) h = hs * fac;
        else if (fac < 1.0) h = std::min(h, hs * fac);
      } else {
        ++out.rejected;
        h = hs * fac;
      }
    }
    out.v.push_back(y[0]);
    out.w.push_back(y[1]);
    if (should_stop(rule, ode.u(t, y[0]), y[1] - 2.0 * ode.c())) {
      out.stopped_early = true;
      return out;
    }
  }
  return out;
}

void fill_samples(RadialSolution& sol, const RawProfile& raw) {
  const double c = sol.log_coefficient();
  const std::size_t n = raw.v.size();
  sol.grid.resize(n);
  sol.v = raw.v;
  sol.rv = raw.w;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = sol.t0 + static_cast<double>(k) * sol.dt;
    const double r = std::exp(t);
    sol.grid[k] = {r, raw.v[k] - 2.0 * c * t, (raw.w[k] - 2.0 * c) / r};
  }
}

BoundaryType classify_tail(const RadialSolution& sol, int samples_per_decade) {
  const auto& g = sol.grid;
  const RadialSample& last = g.back();
  const double ru = last.r * last.du;
  if (sol.diagnostics.stopped_early) {
    return last.u < 0.0 ? BoundaryType::NonTopologicalI : BoundaryType::NonTopologicalII;
  }
  if (std::abs(last.u) < 1e-6 && std::abs(ru) < 1e-4) return BoundaryType::Topological;
  if (last.u < -25.0) return BoundaryType::NonTopologicalI;
  if (last.u > 25.0) return BoundaryType::NonTopologicalII;
  const std::size_t n = g.size();
  const std::size_t span = static_cast<std::size_t>(samples_per_decade);
  if (n > span) {
    bool down = true, up = true;
    for (std::size_t k = n - span; k < n; ++k) {
      const double q = g[k].r * g[k].du;
      down = down && (-q > 2.0) && g[k].u < g[k - 1].u;
      up = up && (q > 2.0) && g[k].u > g[k - 1].u;
    }
    if (down) return BoundaryType::NonTopologicalI;
    if (up) return BoundaryType::NonTopologicalII;
  }
  return BoundaryType::Undetermined;
}

// Aitken extrapolation of -r v' over the last three decades.
double extrapolate_beta(const RadialSolution& sol, int samples_per_decade) {
  const std::size_t n = sol.rv.size();
  const double b3 = -sol.rv.back();
  const std::size_t d = static_cast<std::size_t>(samples_per_decade);
  if (n <= 2 * d) return b3;
  const double b1 = -sol.rv[n - 1 - 2 * d];
  const double b2 = -sol.rv[n - 1 - d];
  const double d1 = b2 - b1;
  const double d2 = b3 - b2;
  if (d1 == 0.0 || d2 == 0.0) return b3;
  const double ratio = d2 / d1;
  if (!(ratio > 0.0 && ratio < 0.9)) return b3;
  return b3 - d2 * d2 / (d2 - d1);
}

double simpson(const std::vector<double>& g, double h) {
  const std::size_t m = g.size();
  if (m < 2) return 0.0;
  if (m == 2) return 0.5 * h * (g[0] + g[1]);
  const std::size_t intervals = m - 1;
  double acc = 0.0;
  std::size_t end = intervals;
  if (intervals % 2 == 1) {
    // Simpson 3/8 on the last three intervals.
    if (intervals >= 3) {
      const std::size_t a = intervals - 3;
      acc += 3.0 * h / 8.0 * (g[a] + 3.0 * g[a + 1] + 3.0 * g[a + 2] + g[a + 3]);
      end = a;
    } else {
      acc += 0.5 * h * (g[0] + g[1]);
      return acc;
    }
  }
  for (std::size_t k = 0; k + 2 <= end; k += 2) acc += h / 3.0 * (g[k] + 4.0 * g[k + 1] + g[k + 2]);
  return acc;
}

double density_f(const Kernel& k, double u) { return k.f(u); }
double density_F1(const Kernel& k, double u) { return k.F1(u); }
double density_F2(const Kernel& k, double u) { return k.F2(u); }
double density_q(const Kernel& k, double u) { return k.quantization(u); }

}  // namespace

std::string to_string(BoundaryType b) {
  switch (b) {
    case BoundaryType::Topological: return "Topological";
    case BoundaryType::NonTopologicalI: return "NonTopologicalI";
    case BoundaryType::NonTopologicalII: return "NonTopologicalII";
    case BoundaryType::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

std::string to_string(MassKind k) {
  switch (k) {
    case MassKind::Flux: return "Flux";
    case MassKind::F1Mass: return "F1Mass";
    case MassKind::F2Mass: return "F2Mass";
    case MassKind::Quantization: return "Quantization";
  }
  return "Flux";
}

namespace {

RadialSolution integrate_once(double s, double nu, double tau, double r_max, double tol,
                              const RadialOptions& opts, StopRule rule) {
  RadialSolution sol;
  sol.s = s;
  sol.nu = nu;
  sol.tau = tau;
  sol.orientation = opts.orientation;
  sol.nonlinearity = opts.nonlinearity;
  sol.t0 = std::log(opts.r0);
  sol.dt = std::log(10.0) / opts.samples_per_decade;
  const Kernel kernel(tau, opts.nonlinearity);
  const double c = sol.log_coefficient();
  const double t_end = std::log(r_max);
  const auto n_out = static_cast<std::size_t>(std::ceil((t_end - sol.t0) / sol.dt - 1e-9));
  const RadialOde ode(kernel, c);
  const RawProfile raw =
      integrate_profile(ode, series_start(kernel, s, nu, c, opts.r0), sol.t0, sol.dt, n_out, tol, rule);
  fill_samples(sol, raw);
  sol.diagnostics.steps = raw.steps;
  sol.diagnostics.rejected = raw.rejected;
  sol.diagnostics.stopped_early = raw.stopped_early;
  sol.diagnostics.r_end = sol.grid.back().r;
  sol.diagnostics.beta_raw = -sol.rv.back();
  return sol;
}

}  // namespace

RadialSolution integrate_radial(double s, double nu, double tau, double r_max, double tol,
                                const RadialOptions& opts) {
  if (!std::isfinite(s)) throw DomainError("integrate_radial: s must be finite");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw std::invalid_argument("integrate_radial: nu must be >= 0");
  if (!(tau > 0.0)) throw std::invalid_argument("integrate_radial: tau must be > 0");
  if (!(tol > 0.0 && tol <= 1e-3)) throw std::invalid_argument("integrate_radial: tol must lie in (0, 1e-3]");
  if (!(r_max >= 10.0)) throw std::invalid_argument("integrate_radial: r_max must be >= 10");
  if (!(opts.r0 > 0.0 && opts.r0 < 1e-2)) throw std::invalid_argument("integrate_radial: r0 must lie in (0, 0.01)");
  if (opts.samples_per_decade < 8) throw std::invalid_argument("integrate_radial: samples_per_decade < 8");

  double rm = r_max;
  RadialSolution sol;
  for (int attempt = 0;; ++attempt) {
    sol = integrate_once(s, nu, tau, rm, tol, opts, StopRule::Overflow);
    sol.bc_type = classify_tail(sol, opts.samples_per_decade);
    sol.diagnostics.retries = attempt;
    if (sol.bc_type != BoundaryType::Undetermined || attempt >= opts.max_retries) break;
    rm *= 100.0;
  }
  sol.beta = sol.diagnostics.stopped_early ? -sol.rv.back() : extrapolate_beta(sol, opts.samples_per_decade);
  if (sol.bc_type == BoundaryType::Undetermined) {
    sol.warnings.push_back("tail could not be classified up to r = " + std::to_string(sol.grid.back().r));
  }
  return sol;
}

int count_monotone_violations(const std::vector<BetaSample>& samples, double noise) {
  int bad = 0;
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const BetaSample& a = samples[k];
    const BetaSample& b = samples[k + 1];
    if (a.failed || b.failed) continue;
    if ((a.s < 0.0) != (b.s < 0.0)) continue;
    if (b.beta - a.beta < -noise) ++bad;
  }
  return bad;
}

BetaCurve compute_beta_curve(double tau, const std::vector<double>& s_values, double r_max, double tol,
                             const RadialOptions& opts) {
  for (double s : s_values) {
    if (s == 0.0) throw std::invalid_argument("compute_beta_curve: s values must be nonzero");
  }
  if (!std::is_sorted(s_values.begin(), s_values.end())) {
    throw std::invalid_argument("compute_beta_curve: s values must be sorted");
  }
  BetaCurve curve;
  curve.tau = tau;
  curve.samples.resize(s_values.size());
  const long n = static_cast<long>(s_values.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long k = 0; k < n; ++k) {
    BetaSample& out = curve.samples[k];
    out.s = s_values[k];
    try {
      const RadialSolution sol = integrate_radial(out.s, 0.0, tau, r_max, tol, opts);
      out.beta = sol.beta;
      out.bc_type = sol.bc_type;
    } catch (const std::exception& e) {
      out.failed = true;
      out.beta = std::numeric_limits<double>::quiet_NaN();
      out.error = e.what();
    }
  }
  curve.monotone_violations = count_monotone_violations(curve.samples);
  return curve;
}

int tail_sign(double s, double nu, double tau, const TopologicalOptions& opts) {
  const RadialSolution sol = integrate_once(s, nu, tau, opts.r_search, opts.tol, opts.radial, StopRule::Diverging);
  const double u = sol.grid.back().u;
  if (u > 0.0) return 1;
  if (u < 0.0) return -1;
  return 0;
}

RadialSolution find_topological(double nu, double tau, std::optional<std::pair<double, double>> bracket,
                                const TopologicalOptions& opts) {
  if (opts.radial.nonlinearity == Nonlinearity::CSH && nu > 0.0) {
    throw UnsupportedOperation("find_topological: vortex sources are not supported in CSH mode");
  }
  if (!(nu >= 0.0)) throw std::invalid_argument("find_topological: nu must be >= 0");

  double lo, hi;
  int sign_lo, sign_hi;
  std::optional<double> exact;
  if (bracket) {
    lo = bracket->first;
    hi = bracket->second;
    if (!(lo < hi)) throw BracketError("find_topological: bracket must satisfy lo < hi");
    sign_lo = tail_sign(lo, nu, tau, opts);
    sign_hi = tail_sign(hi, nu, tau, opts);
    if (sign_lo == 0) exact = lo;
    else if (sign_hi == 0) exact = hi;
    else if (sign_lo == sign_hi) {
      throw BracketError("find_topological: both bracket ends have the same tail behaviour");
    }
  } else {
    const int m = std::max(opts.scan_points, 2);
    double prev_s = opts.scan_min;
    int prev = tail_sign(prev_s, nu, tau, opts);
    bool found = prev == 0;
    if (found) exact = prev_s;
    lo = hi = prev_s;
    sign_lo = sign_hi = prev;
    for (int i = 1; i < m && !found; ++i) {
      const double s = opts.scan_min + (opts.scan_max - opts.scan_min) * i / (m - 1);
      const int sg = tail_sign(s, nu, tau, opts);
      if (sg == 0) {
        exact = s;
        found = true;
      } else if (sg != prev) {
        lo = prev_s;
        hi = s;
        sign_lo = prev;
        sign_hi = sg;
        found = true;
      }
      prev = sg;
      prev_s = s;
    }
    if (!found) throw BracketError("find_topological: no sign change of the tail in the scan range");
  }

  int iterations = 0;
  if (!exact) {
    while (hi - lo > opts.width_tol && iterations < opts.max_iterations) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      ++iterations;
      const int sg = tail_sign(mid, nu, tau, opts);
      if (sg == 0) {
        exact = mid;
        break;
      }
      if (sg == sign_lo) lo = mid;
      else hi = mid;
    }
  }
  const double s_star = exact ? *exact : 0.5 * (lo + hi);

  RadialSolution sol = integrate_once(s_star, nu, tau, opts.r_search, opts.tol, opts.radial, StopRule::Diverging);
  sol.diagnostics.bisection_iterations = iterations;
  sol.diagnostics.bracket_width = exact ? 0.0 : hi - lo;

  // The bisected profile follows the decaying mode until the residual growing
  // mode takes over; cut at the point closest to the origin of phase space.
  const Kernel kernel(tau, opts.radial.nonlinearity);
  const double k = std::sqrt(-kernel.df_at_zero());
  std::size_t cut = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    const double e = sol.grid[i].u * sol.grid[i].u + (sol.grid[i].du / k) * (sol.grid[i].du / k);
    if (e < best) {
      best = e;
      cut = i;
    }
  }
  sol.diagnostics.truncation_radius = sol.grid[cut].r;
  sol.diagnostics.truncation_u = sol.grid[cut].u;
  const double ru_cut = sol.grid[cut].r * sol.grid[cut].du;
  const double rv_cut = sol.rv[cut];

  const double c = sol.log_coefficient();
  const auto n_total =
      static_cast<std::size_t>(std::ceil((std::log(opts.r_max) - sol.t0) / sol.dt - 1e-9)) + 1;
  sol.grid.resize(std::max(n_total, cut + 1));
  sol.v.resize(sol.grid.size());
  sol.rv.resize(sol.grid.size());
  for (std::size_t i = cut + 1; i < sol.grid.size(); ++i) {
    const double t = sol.t0 + static_cast<double>(i) * sol.dt;
    sol.grid[i] = {std::exp(t), 0.0, 0.0};
    sol.v[i] = 2.0 * c * t;
    sol.rv[i] = 2.0 * c;
  }
  sol.diagnostics.r_end = sol.grid.back().r;
  sol.diagnostics.beta_raw = -rv_cut;
  sol.diagnostics.stopped_early = false;
  sol.beta = exact ? -sol.rv.back() : -2.0 * c;
  if (std::abs(sol.diagnostics.truncation_u) < opts.topological_tolerance && std::abs(ru_cut) < 1e-4) {
    sol.bc_type = BoundaryType::Topological;
  } else {
    sol.bc_type = BoundaryType::Undetermined;
    sol.warnings.push_back("bisected profile did not reach the topological tolerance");
  }
  return sol;
}

double radial_integral(const RadialSolution& sol, double (*density)(const Kernel&, double), std::size_t last,
                       int stride) {
  if (sol.grid.empty()) return 0.0;
  last = std::min(last, sol.grid.size() - 1);
  if (stride < 1) throw std::invalid_argument("radial_integral: stride must be >= 1");
  const Kernel k = sol.kernel();
  std::vector<double> g;
  g.reserve(last / stride + 1);
  for (std::size_t i = 0; i <= last; i += stride) {
    const double r = sol.grid[i].r;
    g.push_back(density(k, sol.grid[i].u) * r * r);
  }
  const double r0 = sol.grid.front().r;
  // Disc of radius r0 with the density frozen at its edge value.
  const double core = density(k, sol.grid.front().u) * r0 * r0 / 2.0;
  return kTwoPi * (core + simpson(g, sol.dt * stride));
}

double mass_integral(const RadialSolution& sol, MassKind kind, bool* warning) {
  if (warning) *warning = sol.bc_type == BoundaryType::Undetermined;
  double (*density)(const Kernel&, double) = nullptr;
  switch (kind) {
    case MassKind::Flux: density = density_f; break;
    case MassKind::F1Mass: density = density_F1; break;
    case MassKind::F2Mass: density = density_F2; break;
    case MassKind::Quantization: density = density_q; break;
  }
  return radial_integral(sol, density, sol.grid.size() - 1);
}

double flux_identity_error(const RadialSolution& sol) {
  if (sol.grid.size() < 2) return 0.0;
  const Kernel k = sol.kernel();
  const double c = sol.log_coefficient();
  auto g = [&](std::size_t i, double& dg) {
    const double t = sol.t0 + static_cast<double>(i) * sol.dt;
    const double e2 = std::exp(2.0 * t);
    const double u = sol.grid[i].u;
    const double f = k.f(u);
    dg = e2 * (2.0 * f + k.df(u) * (sol.rv[i] - 2.0 * c));
    return e2 * f;
  };
  double dg0;
  double g0 = g(0, dg0);
  double q = -sol.rv[0];
  double worst = 0.0;
  const double h = sol.dt;
  for (std::size_t i = 1; i < sol.grid.size(); ++i) {
    double dg1;
    const double g1 = g(i, dg1);
    q += 0.5 * h * (g0 + g1) + h * h / 12.0 * (dg0 - dg1);
    worst = std::max(worst, std::abs(sol.rv[i] + q));
    g0 = g1;
    dg0 = dg1;
  }
  return worst;
}

double tail_slope(const RadialSolution& sol) {
  const double r_end = sol.grid.back().r;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& p : sol.grid) {
    if (p.r < r_end / 10.0) continue;
    const double x = std::log(p.r);
    sx += x;
    sy += p.u;
    sxx += x * x;
    sxy += x * p.u;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace o3v

namespace o3v {

RadialSample sample_at(const RadialSolution& sol, double r) {
  if (sol.grid.size() < 2) throw std::invalid_argument("sample_at: empty profile");
  if (!(r > 0.0)) throw std::invalid_argument("sample_at: r must be positive");
  const double c = sol.log_coefficient();
  const double t = std::log(r);
  if (r <= sol.grid.front().r) {
    return {r, sol.v.front() - 2.0 * c * t, -2.0 * c / r};
  }
  if (r > sol.grid.back().r * (1.0 + 1e-12)) {
    throw std::out_of_range("sample_at: r beyond the profile");
  }
  const double x = (t - sol.t0) / sol.dt;
  std::size_t i = std::min(static_cast<std::size_t>(x), sol.grid.size() - 2);
  const double s = x - static_cast<double>(i);
  // Hermite on v with derivative dv/dt = r v'.
  const double v0 = sol.v[i], v1 = sol.v[i + 1];
  const double d0 = sol.rv[i] * sol.dt, d1 = sol.rv[i + 1] * sol.dt;
  const double s2 = s * s, s3 = s2 * s;
  const double v = (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * d0 + (-2 * s3 + 3 * s2) * v1 + (s3 - s2) * d1;
  const double dv = ((6 * s2 - 6 * s) * v0 + (3 * s2 - 4 * s + 1) * d0 + (-6 * s2 + 6 * s) * v1 + (3 * s2 - 2 * s) * d1) /
                    sol.dt;
  return {r, v - 2.0 * c * t, (dv - 2.0 * c) / r};
}

}  // namespace o3v
