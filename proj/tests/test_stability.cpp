#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "o3v/spectral.hpp"
#include "o3v/stability.hpp"

using namespace o3v;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kL = 2.0 * kPi;

TorusField constant_field(const TorusDomain& d, double tau, double eps, double c) {
  TorusField f;
  f.domain = d;
  f.params = ModelParams(tau, eps);
  f.u0 = Grid(d);
  f.v = Grid(d, c);
  return f;
}

// Random trigonometric polynomial with |k| <= 4.
Grid random_smooth(const TorusDomain& d, std::mt19937& rng) {
  std::normal_distribution<double> nd;
  Grid g(d);
  for (int a = 0; a <= 4; ++a) {
    for (int b = -4; b <= 4; ++b) {
      const double c = nd(rng), s = nd(rng);
      for (int i = 0; i < d.n1(); ++i) {
        for (int j = 0; j < d.n2(); ++j) {
          const double ph = 2 * kPi * (a * i / double(d.n1()) + b * j / double(d.n2()));
          g(i, j) += c * std::cos(ph) + s * std::sin(ph);
        }
      }
    }
  }
  return g;
}

double grid_dot(const Grid& a, const Grid& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

const TorusField& vortex_field() {
  static const TorusField f = [] {
    VortexSet v;
    v.add_positive({kL / 2, kL / 2}, 1);
    return solve_newton(TorusDomain(kL, kL, 128, 128), v, ModelParams(1.0, 0.2), nullptr,
                        continuation_schedule(0.2));
  }();
  return f;
}

// Quotient int (psi_r^2 - f'(u) psi^2) r dr / int (1 - e^u) psi^2 r dr for
// psi = 1 / (1 + (r/a)^2)^2, trapezoid in t = ln r on the profile samples.
double trial_quotient(const RadialSolution& sol, double a) {
  const Kernel k = sol.kernel();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < sol.grid.size(); ++i) {
    const double r = sol.grid[i].r, u = sol.grid[i].u;
    const double q = 1.0 + (r / a) * (r / a);
    const double psi = 1.0 / (q * q);
    const double dpsi = -4.0 * r / (a * a) / (q * q * q);
    const double wt = (i == 0 || i + 1 == sol.grid.size() ? 0.5 : 1.0) * r * r * sol.dt;
    num += wt * (dpsi * dpsi - k.df(u) * psi * psi);
    den += wt * (-std::expm1(u)) * psi * psi;
  }
  return num / den;
}

}  // namespace

TEST_CASE("constant-coefficient oracle: mu = -eps^{-2} f'(c) with a constant eigenvector") {
  const TorusDomain d(kL, kL, 64, 64);
  for (double tau : {1.0, 0.5, 2.0}) {
    for (double c : {0.0, 1.0, -1.0}) {
      const double eps = 0.1;
      const EigenResult r = principal_eigen_torus(constant_field(d, tau, eps, c));
      const double exact = -df_tau(c, tau) / (eps * eps);
      CHECK(std::abs(r.eigenvalue - exact) <= 1e-10 * std::abs(exact));
      CHECK(r.positive);
      if (c == 0.0) CHECK(exact == doctest::Approx(1.0 / (eps * eps * std::pow(tau + 1.0, 3))).epsilon(1e-15));
      // L2(Omega) normalization.
      CHECK(r.eigenvector[0] * r.eigenvector[0] * d.area() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("one-vortex topological field is strictly stable") {
  const TorusField& f = vortex_field();
  const EigenResult r = principal_eigen_torus(f);
  CHECK(r.eigenvalue > 0.0);
  CHECK(r.positive);
  CHECK(std::abs(r.eigenvalue - r.rayleigh) <= 1e-8 * std::max(1.0, std::abs(r.eigenvalue)));
  CHECK(r.residual_norm <= r.tolerance);
  CHECK(classify_stability(r, default_margin(0.2)) == Stability::StrictlyStable);
  CHECK(0.04 * r.eigenvalue >= -Kernel(f.params).sup_abs_df());
}

TEST_CASE("Rayleigh quotients of random smooth functions bound the eigenvalue from above") {
  const TorusField& f = vortex_field();
  const EigenResult r = principal_eigen_torus(f);
  std::mt19937 rng(20240611);
  Grid ap(f.domain);
  for (int t = 0; t < 20; ++t) {
    const Grid phi = random_smooth(f.domain, rng);
    apply_linearized(f, phi, ap);
    const double q = grid_dot(phi, ap) / grid_dot(phi, phi);
    CHECK(q >= r.eigenvalue - 1e-8);
  }
}

TEST_CASE("the linearized operator is symmetric") {
  const TorusField& f = vortex_field();
  std::mt19937 rng(7);
  Grid aphi(f.domain), apsi(f.domain);
  for (int t = 0; t < 5; ++t) {
    const Grid phi = random_smooth(f.domain, rng);
    const Grid psi = random_smooth(f.domain, rng);
    apply_linearized(f, phi, aphi);
    apply_linearized(f, psi, apsi);
    const double lhs = grid_dot(aphi, psi), rhs = grid_dot(phi, apsi);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + std::abs(rhs)));
  }
}

TEST_CASE("eps^2 mu is bounded below by -sup|f'| for arbitrary fields") {
  const TorusDomain d(kL, kL, 64, 64);
  std::mt19937 rng(3);
  TorusField f = constant_field(d, 1.0, 0.1, 0.0);
  f.v = random_smooth(d, rng);
  const EigenResult r = principal_eigen_torus(f);
  CHECK(0.01 * r.eigenvalue >= -Kernel(f.params).sup_abs_df());
  CHECK(r.positive);
}

TEST_CASE("type-I radial profiles are unstable") {
  for (double s : {-1.0, -3.0}) {
    const RadialSolution sol = integrate_radial(s, 0.0, 1.0);
    REQUIRE(sol.bc_type == BoundaryType::NonTopologicalI);
    const EigenResult r = weighted_eigen_radial(sol);
    CHECK(r.eigenvalue < 0.0);
    CHECK(r.reliable);
    CHECK(*r.sensitivity < 0.05);
    CHECK(r.positive);
    CHECK(std::abs(r.eigenvalue - r.rayleigh) <= 1e-8 * std::max(1.0, std::abs(r.eigenvalue)));
    CHECK(r.residual_norm < r.tolerance);
    CHECK(classify_stability(r, 1e-8) == Stability::Unstable);
    // Variational upper bound from explicit trial functions.
    double best = 1e300;
    for (double a = 1.0; a < 1e3; a *= 1.5) best = std::min(best, trial_quotient(sol, a));
    CHECK(best < 0.0);
    CHECK(r.eigenvalue <= best + 1e-6);
  }
  RadialOptions o;
  o.orientation = SourceOrientation::PositiveVortex;
  const RadialSolution sol = integrate_radial(-6.0, 1.0, 1.0, 1e6, 1e-10, o);
  REQUIRE(sol.bc_type == BoundaryType::NonTopologicalI);
  const EigenResult r = weighted_eigen_radial(sol);
  CHECK(r.eigenvalue < 0.0);
  CHECK(r.reliable);
}

TEST_CASE("radial eigenvalue converges under grid refinement") {
  RadialOptions fine;
  fine.samples_per_decade = 400;
  const double coarse = weighted_eigen_radial(integrate_radial(-1.0, 0.0, 1.0)).eigenvalue;
  const double refined = weighted_eigen_radial(integrate_radial(-1.0, 0.0, 1.0, 1e6, 1e-10, fine)).eigenvalue;
  CHECK(std::abs(coarse - refined) < 1e-3 * std::abs(refined));
}

TEST_CASE("topological radial profile: positive weighted spectrum, indefinite weight rejected") {
  TopologicalOptions o;
  o.radial.orientation = SourceOrientation::PositiveVortex;
  const RadialSolution sol = find_topological(1.0, 1.0, std::nullopt, o);
  const EigenResult r = weighted_eigen_radial(sol);
  CHECK(r.eigenvalue > 0.0);
  CHECK(r.positive);
  CHECK(classify_stability(r, 1e-8) == Stability::StrictlyStable);

  const RadialSolution neg = find_topological(1.0, 1.0);
  CHECK_THROWS_AS(weighted_eigen_radial(neg), WeightIndefinite);
}

TEST_CASE("classification") {
  EigenResult r;
  r.eigenvalue = 5.0;
  CHECK(classify_stability(r, 1e-8) == Stability::StrictlyStable);
  r.eigenvalue = -0.3;
  CHECK(classify_stability(r, 1e-8) == Stability::Unstable);
  r.eigenvalue = 0.0;
  CHECK(classify_stability(r, 1e-8) == Stability::Marginal);
  CHECK(classify_stability(r, 0.0) == Stability::Marginal);
  CHECK(default_margin(0.1) == doctest::Approx(1e-6));
  std::vector<EigenResult> batch(3);
  batch[0].eigenvalue = 1.0;
  batch[1].eigenvalue = -1.0;
  const auto out = classify_batch(batch, 1e-8);
  CHECK(out == std::vector<Stability>{Stability::StrictlyStable, Stability::Unstable, Stability::Marginal});
  CHECK(to_string(Stability::Marginal) == "Marginal");
}
