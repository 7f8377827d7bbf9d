#include "o3v/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "o3v/kernels.hpp"
#include "o3v/spectral.hpp"

namespace o3v {

namespace {

constexpr double kPi = std::numbers::pi;

// Area of the disc |x| <= r intersected with [x0,x1] x [y0,y1].
double disc_rect_area(double r, double x0, double x1, double y0, double y1) {
  const double a = std::max(x0, -r), b = std::min(x1, r);
  if (!(a < b) || !(y0 < y1)) return 0.0;
  auto s = [r](double x) { return std::sqrt(std::max(0.0, r * r - x * x)); };
  auto S = [r, &s](double x) { return 0.5 * (x * s(x) + r * r * std::asin(std::clamp(x / r, -1.0, 1.0))); };
  std::vector<double> cuts{a, b};
  for (double y : {y0, y1}) {
    if (std::abs(y) < r) {
      const double c = std::sqrt(r * r - y * y);
      for (double x : {-c, c}) {
        if (x > a && x < b) cuts.push_back(x);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    const double sm = s(mid);
    const bool top_is_arc = sm < y1;
    const bool bottom_is_arc = -sm > y0;
    const double top = top_is_arc ? sm : y1, bottom = bottom_is_arc ? -sm : y0;
    if (top <= bottom) continue;
    const double arcs = (top_is_arc ? 1.0 : 0.0) + (bottom_is_arc ? 1.0 : 0.0);
    const double constant = (top_is_arc ? 0.0 : y1) - (bottom_is_arc ? 0.0 : y0);
    area += arcs * (S(hi) - S(lo)) + constant * (hi - lo);
  }
  return area;
}

struct VortexInfo {
  Point2 p;
  int sign = +1;
  int multiplicity = 0;
};

VortexInfo vortex_info(const TorusField& field, std::size_t id) {
  if (id >= field.vortices.size()) throw std::out_of_range("vortex id " + std::to_string(id) + " out of range");
  int sign = 0;
  const Vortex& v = field.vortices.at(id, &sign);
  return {v.p, sign, v.multiplicity};
}

void check_ball(const TorusField& field, Point2 p, double r, std::size_t skip) {
  const TorusDomain& d = field.domain;
  if (!(r > 0.0)) throw GeometryError("ball radius must be positive");
  if (2.0 * r >= std::min(d.L1(), d.L2())) throw GeometryError("ball does not fit in the fundamental domain");
  for (std::size_t id = 0; id < field.vortices.size(); ++id) {
    if (id == skip) continue;
    const VortexInfo o = vortex_info(field, id);
    const double dist = d.distance(p, o.p);
    if (dist < 2.0 * r) {
      std::ostringstream os;
      os << "ball of radius " << r << " overlaps the ball about vortex " << id;
      throw GeometryError(os.str());
    }
  }
}

double ball_integral(const TorusField& field, const Grid& density, Point2 p, double r) {
  const Grid w = ball_coverage(field.domain, p, r);
  return kernels::serial::dot(w, density) * field.domain.cell_area();
}

Grid scaled_density(const TorusField& field, Density kind, double factor) {
  Grid g = density_grid(field, kind);
  kernels::serial::map(g, g, [factor](std::size_t, double v) { return factor * v; });
  return g;
}

// u at an arbitrary point: exact singular background plus interpolated v.
struct FieldEvaluator {
  const TorusField& field;
  TorusGreen green;
  Spectral sp;
  FourierInterpolant v;

  explicit FieldEvaluator(const TorusField& f)
      : field(f), green(f.domain.L1(), f.domain.L2()), sp(f.domain), v(sp, f.v) {}

  double u(Point2 x) const {
    double s = v.value(x);
    for (const auto& n : field.nodes) s += n.weight() * green.value(field.domain.displacement(x, n.p));
    return s;
  }

  // Gradient of u - 2 m s ln|x - p|, the part that stays smooth at p.
  Gradient2 smooth_gradient(Point2 x, Point2 p, int sm) const {
    Gradient2 g = v.gradient(x);
    for (const auto& n : field.nodes) {
      const Gradient2 gn = green.gradient(field.domain.displacement(x, n.p));
      g.x += n.weight() * gn.x;
      g.y += n.weight() * gn.y;
    }
    const Point2 d = field.domain.displacement(x, p);
    const double r2 = d.x * d.x + d.y * d.y;
    g.x -= 2.0 * sm * d.x / r2;
    g.y -= 2.0 * sm * d.y / r2;
    return g;
  }
};

PohozaevValue torus_pohozaev(const TorusField& field, Point2 p, int sm, double r, int n_angles) {
  if (n_angles < 8) throw std::invalid_argument("pohozaev_value: need at least 8 angles");
  const double eps = field.params.epsilon();
  const double inv_eps2 = 1.0 / (eps * eps);
  const Kernel kernel(field.params);
  PohozaevValue out;
  out.volume = ball_integral(field, scaled_density(field, Density::F2, 2.0 * inv_eps2), p, r);
  FieldEvaluator ev(field);
  double acc = 0.0;
  for (int a = 0; a < n_angles; ++a) {
    const double th = 2.0 * kPi * a / n_angles;
    const double nx = std::cos(th), ny = std::sin(th);
    const Point2 x{p.x + r * nx, p.y + r * ny};
    const Gradient2 g = ev.smooth_gradient(x, p, sm);
    const double dn = g.x * nx + g.y * ny;
    const double gg = g.x * g.x + g.y * g.y;
    const double u = ev.u(x);
    acc += dn * dn * r - 0.5 * gg * r + kernel.F2(u) * r * inv_eps2 + 2.0 * sm * dn;
  }
  out.boundary = acc * (2.0 * kPi / n_angles) * r;
  out.residual = std::abs(out.volume - out.boundary) / std::max(1.0, std::abs(out.boundary));
  return out;
}

}  // namespace

Grid ball_coverage(const TorusDomain& domain, Point2 p, double r) {
  Grid w(domain);
  const double h1 = domain.h1(), h2 = domain.h2();
  const double half_diag = 0.5 * std::hypot(h1, h2);
  for (int i = 0; i < domain.n1(); ++i) {
    for (int j = 0; j < domain.n2(); ++j) {
      const Point2 d = domain.displacement(domain.node(i, j), p);
      const double dist = std::hypot(d.x, d.y);
      if (dist + half_diag <= r) {
        w(i, j) = 1.0;
        continue;
      }
      if (dist - half_diag >= r) continue;
      w(i, j) = std::min(
          1.0, disc_rect_area(r, d.x - 0.5 * h1, d.x + 0.5 * h1, d.y - 0.5 * h2, d.y + 0.5 * h2) / (h1 * h2));
    }
  }
  return w;
}

double vortex_mass(const TorusField& field, std::size_t id, double r) {
  const VortexInfo v = vortex_info(field, id);
  check_ball(field, v.p, r, id);
  const double eps = field.params.epsilon();
  return ball_integral(field, scaled_density(field, Density::F, 1.0 / (eps * eps)), v.p, r);
}

double exterior_mass(const TorusField& field, double r) {
  const double eps = field.params.epsilon();
  const Grid dens = scaled_density(field, Density::F, 1.0 / (eps * eps));
  Grid w(field.domain, 1.0);
  for (std::size_t id = 0; id < field.vortices.size(); ++id) {
    const VortexInfo v = vortex_info(field, id);
    check_ball(field, v.p, r, id);
    const Grid c = ball_coverage(field.domain, v.p, r);
    kernels::serial::map(w, w, [&](std::size_t k, double x) { return x - c[k]; });
  }
  return kernels::serial::dot(w, dens) * field.domain.cell_area();
}

double quantization_value(const TorusField& field, std::size_t id, double r) {
  const VortexInfo v = vortex_info(field, id);
  check_ball(field, v.p, r, id);
  const double eps = field.params.epsilon();
  return ball_integral(field, scaled_density(field, Density::Quantization, 1.0 / (eps * eps)), v.p, r);
}

PohozaevValue pohozaev_value(const TorusField& field, std::size_t id, double r, int n_angles) {
  const VortexInfo v = vortex_info(field, id);
  check_ball(field, v.p, r, id);
  return torus_pohozaev(field, v.p, v.sign * v.multiplicity, r, n_angles);
}

PohozaevValue pohozaev_value_at(const TorusField& field, Point2 center, double r, int n_angles) {
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  check_ball(field, center, 0.5 * r, none);
  for (std::size_t id = 0; id < field.vortices.size(); ++id) {
    if (field.domain.distance(center, vortex_info(field, id).p) <= r + field.domain.h()) {
      throw GeometryError("pohozaev_value_at: a vortex lies in the ball");
    }
  }
  return torus_pohozaev(field, center, 0, r, n_angles);
}

PohozaevValue pohozaev_value(const RadialSolution& sol, std::size_t last, int stride) {
  if (last >= sol.grid.size()) throw std::out_of_range("pohozaev_value: sample index beyond the profile");
  if (last % stride != 0) throw std::invalid_argument("pohozaev_value: last must be a multiple of stride");
  const Kernel k = sol.kernel();
  PohozaevValue out;
  out.volume = radial_integral(
      sol, [](const Kernel& kk, double u) { return 2.0 * kk.F2(u); }, last, stride);
  const double R = sol.grid[last].r;
  const double w = sol.rv[last];
  const double c = sol.log_coefficient();
  out.boundary = 2.0 * kPi * (0.5 * w * w + R * R * k.F2(sol.grid[last].u) - 2.0 * c * w);
  out.residual = std::abs(out.volume - out.boundary) / std::max(1.0, std::abs(out.boundary));
  return out;
}

double pohozaev_limit(const RadialSolution& sol) {
  const double c = sol.log_coefficient();
  return kPi * (sol.beta * sol.beta + 4.0 * c * sol.beta);
}

std::vector<double> geometric_epsilons(double eps_max, double eps_min, int n) {
  if (n < 1 || !(eps_max > 0.0) || !(eps_min > 0.0) || eps_min > eps_max) {
    throw std::invalid_argument("geometric_epsilons: need n >= 1 and 0 < eps_min <= eps_max");
  }
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = eps_max;
    return out;
  }
  const double q = std::pow(eps_min / eps_max, 1.0 / (n - 1));
  for (int i = 0; i < n; ++i) out[i] = eps_max * std::pow(q, i);
  out.back() = eps_min;
  return out;
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config, const std::vector<double>& epsilons,
                                   double K_radius) {
  if (epsilons.empty()) throw std::invalid_argument("run_sweep: empty epsilon list");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || (i > 0 && !(epsilons[i] < epsilons[i - 1]))) {
      throw std::invalid_argument("run_sweep: epsilons must be positive and strictly decreasing");
    }
  }
  const TorusDomain& d = config.domain;
  config.vortices.validate(d.L1(), d.L2());
  double min_sep = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < config.vortices.size(); ++a) {
    for (std::size_t b = a + 1; b < config.vortices.size(); ++b) {
      min_sep = std::min(min_sep, d.distance(config.vortices.at(a).p, config.vortices.at(b).p));
    }
  }
  if (!(K_radius > 0.0) || !(K_radius < 0.5 * min_sep)) {
    throw std::invalid_argument("run_sweep: K_radius must be positive and below half the vortex separation");
  }

  std::vector<SweepRecord> records;
  Grid warm(d);
  bool have_warm = false;
  for (double eps : epsilons) {
    SweepRecord rec;
    rec.epsilon = eps;
    const ModelParams params(config.tau, eps, config.nonlinearity);
    TorusField field;
    try {
      if (!have_warm) {
        const auto sched = eps < config.eps0 ? continuation_schedule(eps, config.eps0, config.ratio)
                                             : std::vector<double>{};
        field = solve_newton(d, config.vortices, params, nullptr, sched, config.newton);
      } else {
        field = solve_newton(d, config.vortices, params, &warm, {}, config.newton);
      }
    } catch (const NonConvergence& e) {
      if (!have_warm) throw SweepError(std::string("run_sweep: first solve failed: ") + e.what());
      rec.error = e.what();
      records.push_back(std::move(rec));
      continue;
    }
    warm = field.v;
    have_warm = true;
    rec.converged = true;
    rec.residual_norm = field.residual_norm;

    double sup = -std::numeric_limits<double>::infinity(), inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < d.n1(); ++i) {
      for (int j = 0; j < d.n2(); ++j) {
        const Point2 x = d.node(i, j);
        bool in_K = true;
        for (const auto& n : field.nodes) in_K = in_K && d.distance(x, n.p) >= K_radius;
        if (!in_K) continue;
        const double u = field.u(d.index(i, j));
        sup = std::max(sup, u);
        inf = std::min(inf, u);
      }
    }
    rec.sup_K = sup;
    rec.inf_K = inf;
    rec.total_abs_mass = mass_bound_report(field);
    rec.total_mass = total_mass(field);
    rec.exterior_mass = exterior_mass(field, config.ball_radius);
    for (std::size_t id = 0; id < field.vortices.size(); ++id) {
      VortexDiagnostics vd;
      vd.id = id;
      const VortexInfo v = vortex_info(field, id);
      vd.sign = v.sign;
      vd.multiplicity = v.multiplicity;
      vd.mass = vortex_mass(field, id, config.ball_radius);
      vd.pohozaev = pohozaev_value(field, id, config.ball_radius);
      vd.quantization = quantization_value(field, id, config.ball_radius);
      vd.beta_combination = -vd.mass / (4.0 * kPi) - v.multiplicity;
      rec.per_vortex.push_back(vd);
    }
    if (config.eigen) {
      try {
        EigenResult er = principal_eigen_torus(field);
        rec.stability = classify_stability(er, default_margin(eps));
        rec.eigen = std::move(er);
      } catch (const NonConvergence& e) {
        rec.error = e.what();
      }
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::string to_string(Alternative a) {
  switch (a) {
    case Alternative::A_uniform_zero: return "A_uniform_zero";
    case Alternative::B_sup_negative: return "B_sup_negative";
    case Alternative::C_inf_positive: return "C_inf_positive";
    case Alternative::Mixed: return "Mixed";
  }
  return "?";
}

namespace {

std::vector<const SweepRecord*> converged(const std::vector<SweepRecord>& records) {
  std::vector<const SweepRecord*> out;
  for (const auto& r : records) {
    if (r.converged) out.push_back(&r);
  }
  return out;
}

double sup_abs(const SweepRecord& r) { return std::max(std::abs(r.sup_K), std::abs(r.inf_K)); }

}  // namespace

DecayTest squared_ratio_test(const std::vector<SweepRecord>& records) {
  const auto rec = converged(records);
  DecayTest t;
  const int n = static_cast<int>(rec.size());
  std::vector<double> last;
  double earlier = 0.0;
  bool have_earlier = false;
  for (int k = 0; k < n; ++k) {
    int best = -1;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
      const double target = 2.0 * rec[k]->epsilon;
      const double gap = std::abs(rec[j]->epsilon - target);
      if (gap <= 0.15 * target && gap < best_gap) {
        best = j;
        best_gap = gap;
      }
    }
    if (best < 0) continue;
    const double sj = sup_abs(*rec[best]), sk = sup_abs(*rec[k]);
    const double c = sk == 0.0 ? 0.0 : (sj == 0.0 ? std::numeric_limits<double>::infinity() : sk / (sj * sj));
    t.ratios.push_back(c);
    t.pair_index.push_back(k);
    if (k >= n - 3) {
      last.push_back(c);
    } else {
      earlier = std::max(earlier, c);
      have_earlier = true;
    }
  }
  t.applicable = last.size() == 3;
  t.C_fit = have_earlier ? 10.0 * earlier : 10.0;
  t.passed = t.applicable && std::all_of(last.begin(), last.end(), [&](double c) { return c <= t.C_fit; });
  return t;
}

AlternativeVerdict classify_alternative(const std::vector<SweepRecord>& records) {
  AlternativeVerdict v;
  const auto rec = converged(records);
  if (rec.empty()) {
    v.evidence = "no converged records";
    return v;
  }
  v.mass_max = 0.0;
  v.mass_min = std::numeric_limits<double>::infinity();
  for (const auto* r : rec) {
    v.mass_max = std::max(v.mass_max, r->total_abs_mass);
    v.mass_min = std::min(v.mass_min, r->total_abs_mass);
  }
  v.decay = squared_ratio_test(records);
  v.final_sup_abs = sup_abs(*rec.back());
  const std::size_t n = rec.size();
  std::ostringstream ev;
  ev.precision(17);
  if (n < 3) {
    v.evidence = "fewer than 3 converged records";
    return v;
  }
  v.sup_abs_decreasing = sup_abs(*rec[n - 2]) < sup_abs(*rec[n - 3]) && sup_abs(*rec[n - 1]) < sup_abs(*rec[n - 2]);
  bool b = true, c = true;
  for (std::size_t i = n - 3; i < n; ++i) {
    b = b && rec[i]->sup_K <= -0.5;
    c = c && rec[i]->inf_K >= 0.5;
  }
  if (v.sup_abs_decreasing && v.final_sup_abs < 0.05) v.kind = Alternative::A_uniform_zero;
  else if (b) v.kind = Alternative::B_sup_negative;
  else if (c) v.kind = Alternative::C_inf_positive;
  ev << "last three max(|sup_K|,|inf_K|): " << sup_abs(*rec[n - 3]) << ", " << sup_abs(*rec[n - 2]) << ", "
     << sup_abs(*rec[n - 1]) << "; sup_K(last) " << rec[n - 1]->sup_K << "; inf_K(last) " << rec[n - 1]->inf_K;
  v.evidence = ev.str();
  return v;
}

RescaledProfile rescale_blowup(const TorusField& field, Point2 center, double scale,
                               const std::vector<double>& radii, int n_angles) {
  if (!(scale >= field.domain.h())) {
    throw ResolutionError("rescale_blowup: scale is below the grid spacing");
  }
  if (n_angles < 1) throw std::invalid_argument("rescale_blowup: n_angles must be positive");
  FieldEvaluator ev(field);
  RescaledProfile out;
  out.radii = radii;
  out.shift = -2.0 * std::log(scale);
  for (double y : radii) {
    double s = 0.0, ss = 0.0;
    for (int a = 0; a < n_angles; ++a) {
      const double th = 2.0 * kPi * a / n_angles;
      const double u = ev.u({center.x + scale * y * std::cos(th), center.y + scale * y * std::sin(th)});
      s += u;
      ss += u * u;
    }
    const double mean = s / n_angles;
    out.mean.push_back(mean);
    out.variance.push_back(std::max(0.0, ss / n_angles - mean * mean));
  }
  return out;
}

double profile_deviation(const RescaledProfile& p, const RadialSolution& sol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.radii.size(); ++i) {
    worst = std::max(worst, std::abs(p.mean[i] - sample_at(sol, p.radii[i]).u));
  }
  return worst;
}

}  // namespace o3v
