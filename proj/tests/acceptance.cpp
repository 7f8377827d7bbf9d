// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit if any
// line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "o3v/asymptotics.hpp"
#include "o3v/core_math.hpp"
#include "o3v/radial.hpp"
#include "o3v/stability.hpp"
#include "o3v/torus.hpp"

using namespace o3v;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kL = 2.0 * kPi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("FAILED ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = a + (b - a) * k / (n - 1);
  return out;
}

VortexSet one_vortex(int m = 1, int sign = +1) {
  VortexSet v;
  if (sign > 0) {
    v.add_positive({kL / 2, kL / 2}, m);
  } else {
    v.add_negative({kL / 2, kL / 2}, m);
  }
  return v;
}

std::size_t index_below(const RadialSolution& sol, double R, std::size_t multiple) {
  std::size_t n = 0;
  while (n + 1 < sol.grid.size() && sol.grid[n + 1].r <= R) ++n;
  return n - n % multiple;
}

// -------------------------------------------------------------------------

Outcome beta_curves() {
  Outcome o;
  // Flux values frozen from an independent RKF78 integration in r (not ln r)
  // carried to R = 1e8.
  struct Golden {
    double tau, s, beta;
  };
  const Golden golden[] = {{0.5, -4, 4.08660280828474}, {0.5, -1, 6.14658203310358}, {1, -4, 4.04935980205924},
                           {1, -1, 5.22038158666772},   {2, -4, 4.03082292915356}, {2, -1, 4.76403698801816}};
  double worst_golden = 0.0, slowest = 0.0;
  for (double tau : {0.5, 1.0, 2.0}) {
    const std::string t = "tau=" + fmt("%g", tau);
    auto t0 = std::chrono::steady_clock::now();
    const BetaCurve neg = compute_beta_curve(tau, linspace(-8.0, -0.25, 16));
    slowest = std::max(slowest, seconds_since(t0));
    t0 = std::chrono::steady_clock::now();
    const BetaCurve pos = compute_beta_curve(tau, linspace(0.25, 8.0, 16));
    slowest = std::max(slowest, seconds_since(t0));

    bool ok = neg.samples.size() == 16 && neg.monotone_violations == 0;
    for (const auto& p : neg.samples) ok = ok && !p.failed && p.beta > 4.0;
    ok = ok && neg.samples.front().beta - 4.0 < neg.samples.back().beta - 4.0;
    o.require(ok, t + " type I branch");

    ok = pos.samples.size() == 16 && pos.monotone_violations == 0;
    for (std::size_t k = 0; k < pos.samples.size(); ++k) {
      ok = ok && !pos.samples[k].failed && pos.samples[k].beta < -4.0;
      if (k > 0) ok = ok && pos.samples[k].beta > pos.samples[k - 1].beta;
    }
    const double b8 = pos.samples.back().beta;
    ok = ok && b8 > -4.5 && b8 < -4.0;
    o.require(ok, t + " type II branch");
    o.note(t + ": beta(-8)=" + fmt("%.6f", neg.samples.front().beta) + " beta(8)=" + fmt("%.6f", b8));
  }
  for (const auto& g : golden) {
    const double b = integrate_radial(g.s, 0.0, g.tau).beta;
    worst_golden = std::max(worst_golden, std::abs(b - g.beta));
  }
  o.require(worst_golden < 1e-9, "frozen interior values");
  o.require(slowest < 120.0, "runtime per curve");
  o.note("golden max err " + fmt("%.1e", worst_golden) + ", slowest curve " + fmt("%.2fs", slowest));
  return o;
}

Outcome beta_zero() {
  Outcome o;
  for (double tau : {0.5, 1.0, 2.0}) {
    const RadialSolution sol = integrate_radial(0.0, 0.0, tau);
    bool zero = sol.beta == 0.0;
    for (const auto& p : sol.grid) zero = zero && p.u == 0.0 && p.du == 0.0;
    o.require(zero, "tau=" + fmt("%g", tau));
    o.require(sol.bc_type == BoundaryType::Topological, "classification");
  }
  o.note("beta(0) = 0 and u = 0 at every sample, tau in {0.5, 1, 2}");
  return o;
}

Outcome quantization() {
  Outcome o;
  for (auto [nu, tau] : {std::pair{1.0, 1.0}, std::pair{2.0, 1.0}, std::pair{1.0, 0.5}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const RadialSolution sol = find_topological(nu, tau);
    const double q = mass_integral(sol, MassKind::Quantization);
    const double rel = std::abs(q / (4.0 * (tau + 1.0) * kPi * nu * nu) - 1.0);
    const std::string t = "(nu,tau)=(" + fmt("%g", nu) + "," + fmt("%g", tau) + ")";
    o.require(sol.bc_type == BoundaryType::Topological && rel < 5e-3, t);
    o.note(t + " rel " + fmt("%.1e", rel) + " in " + fmt("%.2fs", seconds_since(t0)));
  }
  return o;
}

Outcome total_mass_configs() {
  Outcome o;
  const TorusDomain d(kL, kL, 128, 128);
  struct Case {
    std::string name;
    VortexSet v;
    double tau;
  };
  std::vector<Case> cases;
  cases.push_back({"one positive", one_vortex(), 1.0});
  cases.push_back({"one negative tau=2", one_vortex(1, -1), 2.0});
  cases.push_back({"m=2", one_vortex(2), 1.0});
  VortexSet pair;
  pair.add_positive({kL / 4, kL / 2}, 1);
  pair.add_negative({3 * kL / 4, kL / 2}, 1);
  cases.push_back({"N1=N2 pair", pair, 1.0});
  VortexSet three;
  three.add_positive({1.0, 1.0}, 1);
  three.add_positive({4.0, 2.0}, 1);
  three.add_negative({2.5, 5.0}, 1);
  cases.push_back({"2+1", three, 1.0});
  double worst = 0.0;
  for (const auto& c : cases) {
    const TorusField f = solve_newton(d, c.v, ModelParams(c.tau, 0.2), nullptr, continuation_schedule(0.2));
    const int n1 = f.vortices.N1(), n2 = f.vortices.N2();
    const double expected = 4.0 * kPi * (n1 - n2);
    // Relative to 4 pi max(1, N1 + N2) so that the N1 = N2 case is meaningful.
    const double rel = std::abs(total_mass(f) - expected) / (4.0 * kPi * std::max(1, n1 + n2));
    worst = std::max(worst, rel);
    o.require(rel < 1e-6 && f.residual_norm < f.tolerance, c.name);
  }
  o.note(std::to_string(cases.size()) + " configurations, worst rel " + fmt("%.1e", worst));
  return o;
}

Outcome identity() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const TorusField f = solve_newton(TorusDomain(kL, kL, 256, 256), one_vortex(), ModelParams(1.0, 0.1), nullptr,
                                    continuation_schedule(0.1));
  for (double a : {0.5, 1.0, 2.0}) {
    const IdentityResult r = identity_check(f, a);
    o.require(r.rhs == 4.0 * kPi / a, "rhs at a=" + fmt("%g", a));
    o.require(r.rel_err < 1e-3, "a=" + fmt("%g", a));
    o.note("a=" + fmt("%g", a) + " rel " + fmt("%.1e", r.rel_err));
  }
  const double dt = seconds_since(t0);
  o.require(dt < 60.0, "runtime");
  o.note(fmt("%.2fs", dt));
  return o;
}

Outcome stability(const std::vector<SweepRecord>& sweep) {
  Outcome o;
  const TorusDomain d(kL, kL, 64, 64);
  double worst = 0.0;
  for (double tau : {0.5, 1.0, 2.0}) {
    TorusField f;
    f.domain = d;
    f.params = ModelParams(tau, 0.1);
    f.u0 = Grid(d);
    f.v = Grid(d);
    const EigenResult r = principal_eigen_torus(f);
    const double exact = 1.0 / (0.01 * std::pow(tau + 1.0, 3));
    worst = std::max(worst, std::abs(r.eigenvalue - exact) / exact);
  }
  o.require(worst < 1e-10, "(i) constant oracle");
  o.note("(i) rel " + fmt("%.1e", worst));

  bool ok = sweep.size() >= 2;
  for (std::size_t k = sweep.size() >= 2 ? sweep.size() - 2 : 0; k < sweep.size(); ++k) {
    ok = ok && sweep[k].stability && *sweep[k].stability == Stability::StrictlyStable;
    if (sweep[k].eigen) o.note("(ii) eps=" + fmt("%.4f", sweep[k].epsilon) + " mu=" + fmt("%.4f", sweep[k].eigen->eigenvalue));
  }
  o.require(ok, "(ii) smallest sweep epsilons strictly stable");

  for (double s : {-1.0, -3.0}) {
    const RadialSolution sol = integrate_radial(s, 0.0, 1.0);
    const EigenResult r = weighted_eigen_radial(sol);
    const bool unstable = classify_stability(r, default_margin(1.0)) == Stability::Unstable;
    const bool sens = r.sensitivity && *r.sensitivity < 0.05;
    o.require(sol.bc_type == BoundaryType::NonTopologicalI && unstable && r.eigenvalue < 0.0 && sens,
              "(iii) s=" + fmt("%g", s));
    o.note("(iii) s=" + fmt("%g", s) + " mu*=" + fmt("%.6f", r.eigenvalue) +
           " sens=" + fmt("%.1e", r.sensitivity.value_or(NAN)));
  }
  return o;
}

Outcome sweep_check(const std::vector<SweepRecord>& rec, double seconds) {
  Outcome o;
  const AlternativeVerdict v = classify_alternative(rec);
  o.require(v.kind == Alternative::A_uniform_zero, "verdict " + to_string(v.kind));
  bool decreasing = true;
  for (std::size_t k = 1; k < rec.size(); ++k) {
    const double a = std::max(std::abs(rec[k - 1].sup_K), std::abs(rec[k - 1].inf_K));
    const double b = std::max(std::abs(rec[k].sup_K), std::abs(rec[k].inf_K));
    decreasing = decreasing && b < a;
  }
  o.require(decreasing, "sup_K|u| strictly decreasing");
  o.require(v.decay.applicable && v.decay.passed, "squared-ratio test");
  // For one positive vortex the density has one sign, so the bound is the
  // exact mass 4 pi.
  o.require(v.mass_max <= 4.0 * kPi * (1.0 + 1e-6), "total_abs_mass bound");
  o.require(seconds < 600.0, "runtime");
  o.note(std::to_string(rec.size()) + " steps, final sup_K|u| " + fmt("%.2e", v.final_sup_abs) + ", C_fit " +
         fmt("%.2f", v.decay.C_fit) + ", total_abs_mass in [" + fmt("%.10f", v.mass_min) + ", " +
         fmt("%.10f", v.mass_max) + "], " + fmt("%.1fs", seconds));
  return o;
}

Outcome pohozaev_radial() {
  Outcome o;
  const RadialSolution sol = find_topological(1.0, 1.0);
  for (double R : {2.0, 5.0, 20.0, 40.0}) {
    const std::size_t n = index_below(sol, R, 2);
    const PohozaevValue fine = pohozaev_value(sol, n, 1);
    const PohozaevValue coarse = pohozaev_value(sol, n, 2);
    const std::string t = "R=" + fmt("%g", R);
    o.require(fine.residual < 1e-4, t + " residual");
    o.require(coarse.residual >= 2.0 * fine.residual, t + " refinement ratio");
    o.note(t + " " + fmt("%.1e", fine.residual) + " (x" + fmt("%.1f", coarse.residual / fine.residual) + ")");
  }
  return o;
}

Outcome duality() {
  Outcome o;
  double worst = 0.0;
  for (double tau : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    for (double u = -30.0; u <= 30.0; u += 0.125) {
      const double f = f_tau(u, tau);
      const double dual = -f_tau(-u, 1.0 / tau) / (tau * tau * tau);
      worst = std::max(worst, std::abs(f - dual) / std::max(std::abs(f), 1e-300));
    }
  }
  o.require(worst < 1e-12, "kernel identity");
  o.note("kernel rel " + fmt("%.1e", worst));

  const TorusDomain d(kL, kL, 128, 128);
  const double tau = 2.0, eps = 0.15, eps_dual = eps * std::pow(tau, 1.5);
  // The branch continued down from eps = 0.25 at tau = 2 folds near 0.215.
  const TorusField a = solve_newton(d, one_vortex(), ModelParams(tau, eps), nullptr, continuation_schedule(eps, 0.2));
  const TorusField b = solve_newton(d, one_vortex().sign_swapped(), ModelParams(1.0 / tau, eps_dual), nullptr,
                                    continuation_schedule(eps_dual, 0.5));
  double diff = 0.0;
  for (std::size_t k = 0; k < a.v.size(); ++k) {
    if (std::isinf(a.u0[k])) continue;
    diff = std::max(diff, std::abs(a.u(k) + b.u(k)));
  }
  o.require(diff < 1e-8, "solver u <-> -u");
  o.note("solver max|u_a + u_b| " + fmt("%.1e", diff));
  return o;
}

Outcome monotone_vs_newton() {
  Outcome o;
  const TorusDomain d(kL, kL, 256, 256);
  const ModelParams p(1.0, 0.1);
  const TorusField n = solve_newton(d, one_vortex(), p, nullptr, continuation_schedule(0.1));
  MonotoneReport rep;
  const TorusField m =
      solve_monotone(d, one_vortex(), p, Grid(d, -50.0), smoothed_supersolution(d, one_vortex(), 0.05), {}, &rep);
  const double diff = max_abs_diff(m.v, n.v);
  o.require(diff < 1e-8, "max-norm agreement");
  o.require(rep.super_check.violations == 0, "supersolution sign check");
  o.note("max|v_mono - v_newton| " + fmt("%.1e", diff) + ", " + std::to_string(m.iterations) + " monotone iterations");
  return o;
}

}  // namespace

int main() {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  int failed = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("[%s] %2d %-28s %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  };

  SweepConfig sc;
  sc.vortices = one_vortex();
  sc.eigen = true;
  std::vector<SweepRecord> sweep;
  double sweep_seconds = 0.0;
  std::string sweep_error;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    sweep = run_sweep(sc, geometric_epsilons(0.25, 0.05, 8), 1.25);
    sweep_seconds = seconds_since(t0);
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }
  auto need_sweep = [&] {
    if (!sweep_error.empty()) throw std::runtime_error("sweep failed: " + sweep_error);
  };

  report(1, "beta-curve structure", beta_curves);
  report(2, "beta(0) = 0", beta_zero);
  report(3, "quantization", quantization);
  report(4, "exact total mass", total_mass_configs);
  report(5, "a-identity at 256^2", identity);
  report(6, "stability trichotomy", [&] {
    need_sweep();
    return stability(sweep);
  });
  report(7, "epsilon sweep", [&] {
    need_sweep();
    return sweep_check(sweep, sweep_seconds);
  });
  report(8, "radial Pohozaev", pohozaev_radial);
  report(9, "duality", duality);
  report(10, "monotone vs Newton", monotone_vs_newton);
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
