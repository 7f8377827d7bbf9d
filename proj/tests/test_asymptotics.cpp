#include <cmath>
#include <numbers>

#include "doctest.h"
#include "o3v/asymptotics.hpp"

using namespace o3v;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kL = 2.0 * kPi;

VortexSet one_vortex(int m = 1) {
  VortexSet v;
  v.add_positive({kL / 2, kL / 2}, m);
  return v;
}

// u = 0 is the exact solution when the only vortex has multiplicity zero.
TorusField zero_field(const TorusDomain& d, double tau, double eps) {
  VortexSet v;
  v.add_positive({kL / 2, kL / 2}, 0);
  return solve_newton(d, v, ModelParams(tau, eps));
}

std::size_t index_below(const RadialSolution& sol, double R, std::size_t multiple = 1) {
  std::size_t n = 0;
  while (n + 1 < sol.grid.size() && sol.grid[n + 1].r <= R) ++n;
  return n - n % multiple;
}

SweepRecord synthetic(double eps, double sup, double inf) {
  SweepRecord r;
  r.epsilon = eps;
  r.converged = true;
  r.sup_K = sup;
  r.inf_K = inf;
  r.total_abs_mass = 1.0;
  return r;
}

}  // namespace

TEST_CASE("ball coverage weights integrate the disc area exactly") {
  const TorusDomain d(kL, kL, 64, 64);
  for (double r : {0.3, 1.0, 1.7}) {
    for (Point2 p : {Point2{kL / 2, kL / 2}, Point2{0.1234, 6.2}, Point2{3.0, 0.0}}) {
      const Grid w = ball_coverage(d, p, r);
      double area = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) {
        CHECK(w[k] >= 0.0);
        CHECK(w[k] <= 1.0);
        area += w[k];
      }
      CHECK(area * d.cell_area() == doctest::Approx(kPi * r * r).epsilon(1e-13));
    }
  }
}

TEST_CASE("zero solution: masses vanish and the Pohozaev sides equal pi r^2 / (tau^2 (tau+1) eps^2)") {
  const TorusDomain d(kL, kL, 64, 64);
  for (double tau : {1.0, 2.0}) {
    const TorusField f = zero_field(d, tau, 0.2);
    CHECK(max_abs(f.v) == 0.0);
    CHECK(vortex_mass(f, 0, 1.0) == 0.0);
    CHECK(quantization_value(f, 0, 1.0) == 0.0);
    const double r = 0.8;
    const PohozaevValue p = pohozaev_value_at(f, {1.0, 2.0}, r);
    const double exact = kPi * r * r / (tau * tau * (tau + 1.0) * 0.04);
    CHECK(p.volume == doctest::Approx(exact).epsilon(1e-12));
    CHECK(p.boundary == doctest::Approx(exact).epsilon(1e-12));
    CHECK(p.residual < 1e-6);
    const RescaledProfile b = rescale_blowup(f, {kL / 2, kL / 2}, 0.2, {0.5, 1.0, 2.0});
    for (double m : b.mean) CHECK(m == 0.0);
  }
}

TEST_CASE("ball geometry errors") {
  const TorusDomain d(kL, kL, 64, 64);
  VortexSet v;
  v.add_positive({2.0, 3.0}, 1);
  v.add_negative({4.0, 3.0}, 1);
  const TorusField f = solve_newton(d, v, ModelParams(1.0, 0.25));
  CHECK_NOTHROW(vortex_mass(f, 0, 0.9));
  CHECK_THROWS_AS(vortex_mass(f, 0, 1.1), GeometryError);
  CHECK_THROWS_AS(pohozaev_value(f, 1, 1.1), GeometryError);
  CHECK_THROWS_AS(quantization_value(f, 0, 4.0), GeometryError);
  CHECK_THROWS_AS(vortex_mass(f, 5, 0.5), std::out_of_range);
  CHECK_THROWS_AS(rescale_blowup(f, {2.0, 3.0}, 0.5 * d.h(), {1.0}), ResolutionError);
}

TEST_CASE("one-vortex field: mass additivity, local mass, quantization") {
  const TorusDomain d(kL, kL, 128, 128);
  for (int m : {1, 2}) {
    const TorusField f = solve_newton(d, one_vortex(m), ModelParams(1.0, 0.1), nullptr, continuation_schedule(0.1));
    const double r = 1.25;
    const double inside = vortex_mass(f, 0, r);
    const double outside = exterior_mass(f, r);
    CHECK(inside + outside == doctest::Approx(4 * kPi * m).epsilon(1e-10));
    CHECK(inside > 0.0);
    if (m == 1) CHECK(std::abs(inside - 4 * kPi) < 0.1 * 4 * kPi);
    const double q = quantization_value(f, 0, r);
    CHECK(std::abs(q - 8 * kPi * m * m) < 0.05 * 8 * kPi * m * m);
  }
}

TEST_CASE("torus Pohozaev residual decreases under grid refinement") {
  double prev = 1e300;
  for (int n : {64, 128, 256}) {
    const TorusDomain d(kL, kL, n, n);
    const TorusField f = solve_newton(d, one_vortex(), ModelParams(1.0, 0.2), nullptr, continuation_schedule(0.2));
    const PohozaevValue p = pohozaev_value(f, 0, 1.0);
    CHECK(p.residual < 1e-3);
    CHECK(p.residual < 0.5 * prev);
    prev = p.residual;
  }
}

TEST_CASE("radial Pohozaev identity on the topological profile") {
  const RadialSolution sol = find_topological(1.0, 1.0);
  for (double R : {5.0, 20.0}) {
    const std::size_t n = index_below(sol, R, 2);
    const PohozaevValue fine = pohozaev_value(sol, n, 1);
    const PohozaevValue coarse = pohozaev_value(sol, n, 2);
    CHECK(fine.residual < 1e-4);
    CHECK(coarse.residual >= 2.0 * fine.residual);
  }
  CHECK_THROWS_AS(pohozaev_value(sol, 3, 2), std::invalid_argument);
}

TEST_CASE("radial Pohozaev volume term approaches its limit on type-I profiles") {
  RadialOptions pos;
  pos.orientation = SourceOrientation::PositiveVortex;
  const std::vector<RadialSolution> sols{integrate_radial(-1.0, 0.0, 1.0), integrate_radial(-3.0, 0.0, 1.0),
                                         integrate_radial(-6.0, 1.0, 1.0, 1e6, 1e-10, pos)};
  for (const auto& sol : sols) {
    REQUIRE(sol.bc_type == BoundaryType::NonTopologicalI);
    const double limit = pohozaev_limit(sol);
    double prev = 1e300;
    for (double R : {10.0, 100.0, 1e3, 1e4}) {
      const PohozaevValue p = pohozaev_value(sol, index_below(sol, R));
      const double gap = std::abs(p.volume - limit);
      CHECK(gap < prev);
      prev = gap;
    }
    CHECK(std::abs(pohozaev_value(sol, index_below(sol, 1e5)).volume - limit) < 1e-6 * limit);
  }
  // For nu = 0 the limit is pi beta^2.
  CHECK(pohozaev_limit(sols[0]) == doctest::Approx(kPi * sols[0].beta * sols[0].beta).epsilon(1e-15));
}

TEST_CASE("radial profile interpolation") {
  const RadialSolution coarse = integrate_radial(-1.0, 0.0, 1.0);
  RadialOptions o;
  o.samples_per_decade = 400;
  const RadialSolution fine = integrate_radial(-1.0, 0.0, 1.0, 1e6, 1e-10, o);
  double worst = 0.0;
  for (std::size_t k = 1; k + 1 < fine.grid.size(); k += 2) {
    worst = std::max(worst, std::abs(sample_at(coarse, fine.grid[k].r).u - fine.grid[k].u));
  }
  CHECK(worst < 1e-7);
  CHECK(sample_at(coarse, coarse.grid[10].r).u == coarse.grid[10].u);
  CHECK_THROWS_AS(sample_at(coarse, 1e7), std::out_of_range);
}

TEST_CASE("sweep without vortices") {
  SweepConfig c;
  c.domain = TorusDomain(kL, kL, 32, 32);
  const auto rec = run_sweep(c, {0.25, 0.2, 0.16}, 1.0);
  REQUIRE(rec.size() == 3);
  for (const auto& r : rec) {
    CHECK(r.converged);
    CHECK(r.sup_K == 0.0);
    CHECK(r.inf_K == 0.0);
    CHECK(r.total_abs_mass == 0.0);
    CHECK(r.per_vortex.empty());
  }
  CHECK(classify_alternative(rec).kind == Alternative::Mixed);  // never strictly decreasing
  CHECK_THROWS_AS(run_sweep(c, {0.2, 0.25}, 1.0), std::invalid_argument);
}

TEST_CASE("one-vortex sweep on a coarse grid") {
  SweepConfig c;
  c.domain = TorusDomain(kL, kL, 128, 128);
  c.vortices = one_vortex();
  c.eigen = true;
  const auto eps = geometric_epsilons(0.25, 0.1, 5);
  const auto rec = run_sweep(c, eps, 1.25);
  REQUIRE(rec.size() == 5);
  for (std::size_t k = 0; k < rec.size(); ++k) {
    CHECK(rec[k].converged);
    CHECK(rec[k].total_mass == doctest::Approx(4 * kPi).epsilon(1e-10));
    CHECK(rec[k].total_abs_mass >= 0.0);
    REQUIRE(rec[k].stability.has_value());
    CHECK(*rec[k].stability == Stability::StrictlyStable);
    const auto& v = rec[k].per_vortex.at(0);
    CHECK(v.mass + rec[k].exterior_mass == doctest::Approx(rec[k].total_mass).epsilon(1e-10));
    CHECK(v.beta_combination == doctest::Approx(-v.mass / (4 * kPi) - 1.0));
    if (k > 0) {
      CHECK(std::abs(rec[k].sup_K) < std::abs(rec[k - 1].sup_K));
      // Quantization values increase toward 8 pi.
      CHECK(v.quantization > rec[k - 1].per_vortex[0].quantization);
      CHECK(v.quantization < 8 * kPi);
    }
  }
  const AlternativeVerdict verdict = classify_alternative(rec);
  CHECK(verdict.kind == Alternative::A_uniform_zero);
  CHECK(verdict.mass_max / verdict.mass_min < 1.0 + 1e-9);
}

TEST_CASE("blow-up profile approaches the radial topological solution") {
  const TorusDomain d(kL, kL, 128, 128);
  TopologicalOptions o;
  o.radial.orientation = SourceOrientation::PositiveVortex;
  const RadialSolution rad = find_topological(1.0, 1.0, std::nullopt, o);
  Grid warm(d);
  double prev_dev = 1e300, prev_var = 1e300;
  bool first = true;
  for (double eps : {0.25, 0.2, 0.16, 0.128}) {
    const TorusField f = first ? solve_newton(d, one_vortex(), ModelParams(1.0, eps))
                               : solve_newton(d, one_vortex(), ModelParams(1.0, eps), &warm);
    first = false;
    warm = f.v;
    const RescaledProfile p = rescale_blowup(f, f.nodes[0].p, eps, {0.5, 1.0, 2.0, 4.0});
    CHECK(p.shift == doctest::Approx(-2.0 * std::log(eps)));
    const double dev = profile_deviation(p, rad);
    double var = 0.0;
    for (double v : p.variance) var = std::max(var, v);
    CHECK(dev < prev_dev);
    CHECK((var < prev_var || var < 1e-12));
    prev_dev = dev;
    prev_var = var;
  }
}

TEST_CASE("alternative classification on synthetic records") {
  std::vector<SweepRecord> b, mixed, c, a;
  for (double e : {0.2, 0.1, 0.05}) {
    b.push_back(synthetic(e, -0.7, -3.0));
    c.push_back(synthetic(e, 3.0, 0.6));
    a.push_back(synthetic(e, -std::exp(-1.0 / e), -std::exp(-1.0 / e)));
  }
  mixed.push_back(synthetic(0.2, -1e-2, -0.8));
  mixed.push_back(synthetic(0.1, -1e-4, -0.8));
  mixed.push_back(synthetic(0.05, -1e-8, -0.8));
  CHECK(classify_alternative(b).kind == Alternative::B_sup_negative);
  CHECK(classify_alternative(c).kind == Alternative::C_inf_positive);
  CHECK(classify_alternative(mixed).kind == Alternative::Mixed);
  CHECK(classify_alternative(a).kind == Alternative::A_uniform_zero);
  CHECK(classify_alternative({synthetic(0.1, 0.0, 0.0)}).kind == Alternative::Mixed);
}

TEST_CASE("squared-ratio decay test") {
  const auto eps = geometric_epsilons(0.25, 0.05, 8);
  std::vector<SweepRecord> expo, power;
  for (double e : eps) {
    expo.push_back(synthetic(e, -std::exp(-1.0 / e), -std::exp(-1.0 / e)));
    power.push_back(synthetic(e, -std::pow(e, 8.0), -std::pow(e, 8.0)));
  }
  const DecayTest te = squared_ratio_test(expo);
  CHECK(te.applicable);
  CHECK(te.passed);
  CHECK(te.pair_index == std::vector<int>{3, 4, 5, 6, 7});
  const DecayTest tp = squared_ratio_test(power);
  CHECK(tp.applicable);
  CHECK_FALSE(tp.passed);
  CHECK_FALSE(squared_ratio_test({synthetic(0.2, -0.1, -0.1), synthetic(0.1, -0.01, -0.01)}).applicable);
}

TEST_CASE("geometric epsilon schedule") {
  const auto e = geometric_epsilons(0.25, 0.05, 8);
  REQUIRE(e.size() == 8);
  CHECK(e.front() == 0.25);
  CHECK(e.back() == 0.05);
  for (std::size_t i = 1; i < e.size(); ++i) CHECK(e[i] / e[i - 1] == doctest::Approx(std::pow(0.2, 1.0 / 7)));
  CHECK_THROWS_AS(geometric_epsilons(0.1, 0.2, 3), std::invalid_argument);
}
