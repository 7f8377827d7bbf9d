#include "o3v/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "o3v/kernels.hpp"
#include "o3v/linear.hpp"
#include "o3v/spectral.hpp"

namespace o3v {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double density_value(const Kernel& k, double u, Density d) {
  if (std::isfinite(u)) {
    switch (d) {
      case Density::F: return k.f(u);
      case Density::DF: return k.df(u);
      case Density::F1: return k.F1(u);
      case Density::F2: return k.F2(u);
      case Density::Quantization: return k.quantization(u);
    }
  }
  const int sign = u > 0 ? 1 : -1;
  switch (d) {
    case Density::F: return k.f_limit(sign);
    case Density::DF: return k.df_limit(sign);
    case Density::F1: return k.F1_limit(sign);
    case Density::F2: return k.F2_limit(sign);
    case Density::Quantization: return k.quantization_limit(sign);
  }
  return 0.0;
}

// F = Delta v + inv_eps2 f(u0 + v) - c
void compute_residual(Spectral& sp, const Grid& u0, const Grid& v, const Kernel& kernel, double inv_eps2,
                      double c, Grid& out) {
  sp.laplacian(v, out);
  kernels::omp::map(out, out, [&](std::size_t k, double lap) {
    return lap + inv_eps2 * density_value(kernel, u0[k] + v[k], Density::F) - c;
  });
}

std::string format_point(Point2 p) {
  std::ostringstream os;
  os.precision(17);
  os << "(" << p.x << ", " << p.y << ")";
  return os.str();
}

struct Stage {
  Grid v;
  std::vector<double> history;
  int iterations = 0;
  double residual = 0.0;
};

Stage newton_stage(Spectral& sp, const Grid& u0, const Kernel& kernel, double eps, double c, Grid v,
                   const NewtonOptions& o) {
  const double inv_eps2 = 1.0 / (eps * eps);
  const double tol = o.tol_factor * inv_eps2 * o.scale;
  const double sigma = inv_eps2 * std::abs(kernel.df_at_zero());
  const TorusDomain& d = sp.domain();

  Stage st;
  Grid F(d), diag(d), delta(d), trial(d), Ft(d), lap(d);
  compute_residual(sp, u0, v, kernel, inv_eps2, c, F);
  double norm = kernels::omp::max_abs(F);
  st.history.push_back(norm);
  int growth = 0;

  auto apply_a = [&](const Grid& x, Grid& out) {
    sp.laplacian(x, lap);
    kernels::omp::map(x, out, [&](std::size_t k, double xv) { return -lap[k] + diag[k] * xv; });
  };
  auto apply_m = [&](const Grid& in, Grid& out) { sp.solve_shifted(in, out, sigma); };

  for (int it = 0;; ++it) {
    if (norm < tol) break;
    if (it >= o.max_iterations) {
      throw NewtonFailure("Newton: no convergence within the iteration limit", norm, v);
    }
    kernels::omp::map(v, diag, [&](std::size_t k, double vv) {
      return -inv_eps2 * density_value(kernel, u0[k] + vv, Density::DF);
    });
    // Solve (-Delta - eps^{-2} f'(u)) delta = F, i.e. J delta = -F.
    delta = Grid(d);
    LinearResult lr = pcg(apply_a, apply_m, F, delta, o.linear_rtol, o.max_linear);
    if (!lr.converged) {
      delta = Grid(d);
      lr = bicgstab(apply_a, apply_m, F, delta, o.linear_rtol, o.max_linear);
    }

    bool accepted = false;
    double lambda = 1.0;
    double trial_norm = 0.0;
    for (int ls = 0; ls < 5; ++ls, lambda *= 0.5) {
      kernels::omp::map(v, trial, [&](std::size_t k, double vv) { return vv + lambda * delta[k]; });
      compute_residual(sp, u0, trial, kernel, inv_eps2, c, Ft);
      trial_norm = kernels::omp::max_abs(Ft);
      if (trial_norm < norm) {
        accepted = true;
        break;
      }
    }
    std::swap(v, trial);
    std::swap(F, Ft);
    norm = trial_norm;
    st.history.push_back(norm);
    ++st.iterations;
    if (!std::isfinite(norm)) throw NewtonFailure("Newton: non-finite residual", norm, v);
    growth = accepted ? 0 : growth + 1;
    if (growth >= o.max_growth) {
      throw NewtonFailure("Newton: residual grew on consecutive damped steps", norm, v);
    }
  }
  st.v = std::move(v);
  st.residual = norm;
  return st;
}

TorusField make_field(const TorusDomain& domain, const Background& bg, const ModelParams& params) {
  TorusField f;
  f.domain = domain;
  f.vortices = bg.snapped;
  f.params = params;
  f.u0 = bg.u0;
  f.v = Grid(domain);
  f.nodes = bg.nodes;
  f.gamma = bg.gamma;
  f.warnings = bg.warnings;
  return f;
}

void resolution_warning(TorusField& f, double eps) {
  if (f.domain.h() > eps / 4.0) {
    std::ostringstream os;
    os << "grid spacing h = " << f.domain.h() << " exceeds eps/4 = " << eps / 4.0;
    f.warnings.push_back(os.str());
  }
}

}  // namespace

double VortexNode::weight() const { return (sign > 0 ? -kFourPi : kFourPi) * multiplicity; }

double TorusField::mean_source() const { return kFourPi * (vortices.N1() - vortices.N2()) / domain.area(); }

Background make_background(const TorusDomain& domain, const VortexSet& vortices) {
  vortices.validate(domain.L1(), domain.L2());
  Background bg;
  bg.u0 = Grid(domain);
  TorusGreen green(domain.L1(), domain.L2());
  bg.gamma = green.regular_part_at_source();
  std::set<std::size_t> used;
  for (std::size_t id = 0; id < vortices.size(); ++id) {
    int sign = 0;
    const Vortex& vx = vortices.at(id, &sign);
    const auto [i, j] = snap_to_node(domain, vx.p);
    const Point2 p = domain.node(i, j);
    if (sign > 0) bg.snapped.add_positive(p, vx.multiplicity);
    else bg.snapped.add_negative(p, vx.multiplicity);
    if (std::abs(p.x - vx.p.x) > 1e-12 || std::abs(p.y - vx.p.y) > 1e-12) {
      bg.warnings.push_back("vortex " + std::to_string(id) + " snapped from " + format_point(vx.p) + " to " +
                            format_point(p));
    }
    if (vx.multiplicity == 0) continue;
    const std::size_t k = domain.index(i, j);
    if (!used.insert(k).second) {
      throw GeometryError("two vortices snap to the same grid node " + format_point(p));
    }
    VortexNode node;
    node.id = id;
    node.sign = sign;
    node.multiplicity = vx.multiplicity;
    node.p = p;
    node.i = i;
    node.j = j;
    node.k = k;
    bg.nodes.push_back(node);
  }
  for (const auto& node : bg.nodes) {
    kernels::omp::accumulate_green(green, domain, node.p, node.weight(), bg.u0);
  }
  return bg;
}

Grid build_u0(const TorusDomain& domain, const VortexSet& vortices) {
  return make_background(domain, vortices).u0;
}

Grid density_grid(const TorusField& field, Density d) {
  const Kernel kernel(field.params);
  Grid out(field.domain);
  kernels::omp::map(field.v, out,
                    [&](std::size_t k, double vv) { return density_value(kernel, field.u0[k] + vv, d); });
  return out;
}

Grid residual(const TorusField& field) {
  Spectral sp(field.domain);
  Grid out(field.domain);
  const double eps = field.params.epsilon();
  compute_residual(sp, field.u0, field.v, Kernel(field.params), 1.0 / (eps * eps), field.mean_source(), out);
  return out;
}

double total_mass(const TorusField& field) {
  const Kernel kernel(field.params);
  const double eps = field.params.epsilon();
  const double s = kernels::omp::sum_map(field.v, [&](std::size_t k, double vv) {
    return density_value(kernel, field.u0[k] + vv, Density::F);
  });
  return s * field.domain.cell_area() / (eps * eps);
}

double mass_bound_report(const TorusField& field) {
  const Kernel kernel(field.params);
  const double eps = field.params.epsilon();
  const double s = kernels::omp::sum_map(field.v, [&](std::size_t k, double vv) {
    return std::abs(density_value(kernel, field.u0[k] + vv, Density::F));
  });
  return s * field.domain.cell_area() / (eps * eps);
}

std::vector<double> continuation_schedule(double target, double eps0, double ratio) {
  if (!(target > 0.0) || !(eps0 > 0.0) || !(ratio > 0.0 && ratio < 1.0)) {
    throw std::invalid_argument("continuation_schedule: need target > 0, eps0 > 0, 0 < ratio < 1");
  }
  std::vector<double> out;
  for (double e = eps0; e > target * (1.0 + 1e-12); e *= ratio) out.push_back(e);
  out.push_back(target);
  return out;
}

TorusField solve_newton(const TorusDomain& domain, const VortexSet& vortices, const ModelParams& params,
                        const Grid* v_init, const std::vector<double>& continuation, const NewtonOptions& opts) {
  const Background bg = make_background(domain, vortices);
  std::vector<double> schedule = continuation.empty() ? std::vector<double>{params.epsilon()} : continuation;
  for (double e : schedule) {
    if (!(e > 0.0)) throw std::invalid_argument("solve_newton: continuation epsilons must be positive");
  }
  const ModelParams final_params = params.with_epsilon(schedule.back());
  TorusField field = make_field(domain, bg, final_params);
  if (v_init) {
    if (v_init->n1() != domain.n1() || v_init->n2() != domain.n2()) {
      throw std::invalid_argument("solve_newton: initial guess has the wrong shape");
    }
    field.v = *v_init;
  }
  Spectral sp(domain);
  const Kernel kernel(params);
  const double c = field.mean_source();
  Stage st;
  for (double eps : schedule) {
    st = newton_stage(sp, bg.u0, kernel, eps, c, field.v, opts);
    field.v = st.v;
    field.schedule.push_back(eps);
  }
  field.newton_history = st.history;
  field.iterations = st.iterations;
  field.residual_norm = st.residual;
  field.tolerance = opts.tol_factor * opts.scale / (schedule.back() * schedule.back());
  field.method = "newton";
  resolution_warning(field, schedule.back());
  return field;
}

Grid smoothed_supersolution(const TorusDomain& domain, const VortexSet& vortices, double sigma) {
  if (!vortices.negative().empty()) {
    throw std::invalid_argument("smoothed_supersolution: only positive vortices are supported");
  }
  Grid src(domain);
  for (const auto& vx : vortices.positive()) {
    const auto [i, j] = snap_to_node(domain, vx.p);
    src(i, j) += kFourPi * vx.multiplicity / domain.cell_area();
  }
  Spectral sp(domain);
  Grid out(domain);
  sp.apply_symbol(src, out, [sigma](double k2) { return k2 == 0.0 ? 0.0 : std::exp(-0.5 * sigma * sigma * k2) / k2; });
  return out;
}

SignCheck residual_sign_check(const TorusField& probe, int expected_sign) {
  const Grid F = residual(probe);
  const double eps = probe.params.epsilon();
  const double slack = 1e-12 / (eps * eps);
  SignCheck sc;
  for (std::size_t k = 0; k < F.size(); ++k) {
    const double bad = expected_sign > 0 ? -F[k] : F[k];
    if (bad > slack) {
      ++sc.violations;
      sc.worst = std::max(sc.worst, bad);
    }
  }
  return sc;
}

TorusField solve_monotone(const TorusDomain& domain, const VortexSet& vortices, const ModelParams& params,
                          const Grid& sub, const Grid& super, const MonotoneOptions& opts, MonotoneReport* report) {
  if (sub.n1() != domain.n1() || sub.n2() != domain.n2() || super.n1() != domain.n1() ||
      super.n2() != domain.n2()) {
    throw std::invalid_argument("solve_monotone: sub/super have the wrong shape");
  }
  for (std::size_t k = 0; k < sub.size(); ++k) {
    if (sub[k] > super[k]) throw std::invalid_argument("solve_monotone: sub > super at some node");
  }
  const Background bg = make_background(domain, vortices);
  TorusField field = make_field(domain, bg, params);
  const Kernel kernel(params);
  const double eps = params.epsilon();
  const double inv_eps2 = 1.0 / (eps * eps);
  const double K = inv_eps2 * kernel.sup_abs_df();
  const double c = field.mean_source();
  const double tol = opts.tol_factor * inv_eps2;

  MonotoneReport rep;
  rep.shift = K;
  {
    TorusField probe = field;
    probe.v = sub;
    rep.sub_check = residual_sign_check(probe, +1);
    probe.v = super;
    rep.super_check = residual_sign_check(probe, -1);
  }

  Spectral sp(domain);
  Grid v = super, rhs(domain), next(domain), F(domain);
  std::vector<double> history;
  double best = std::numeric_limits<double>::infinity();
  int it = 0;
  for (;; ++it) {
    kernels::omp::map(v, rhs, [&](std::size_t k, double vv) {
      return inv_eps2 * density_value(kernel, bg.u0[k] + vv, Density::F) - c + K * vv;
    });
    sp.solve_shifted(rhs, next, K);
    // (-Delta + K)(next - v) = F(v): the step is a cheap residual proxy.
    double step = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double slack = opts.ordering_slack * std::max(1.0, std::abs(v[k]));
      if (next[k] > v[k] + slack) {
        throw MonotonicityFailure("monotone iteration: iterate increased at node " + std::to_string(k));
      }
      if (next[k] < sub[k] - slack) {
        throw MonotonicityFailure("monotone iteration: iterate fell below the subsolution at node " +
                                  std::to_string(k));
      }
      step = std::max(step, std::abs(next[k] - v[k]));
    }
    std::swap(v, next);
    if (K * step < 10.0 * tol || it + 1 >= opts.max_iterations) {
      compute_residual(sp, bg.u0, v, kernel, inv_eps2, c, F);
      const double norm = kernels::omp::max_abs(F);
      history.push_back(norm);
      best = std::min(best, norm);
      if (norm < tol) break;
      if (it + 1 >= opts.max_iterations) {
        throw NonConvergence("monotone iteration: no convergence within the iteration limit", best);
      }
    }
  }
  field.v = std::move(v);
  field.newton_history = history;
  field.residual_norm = history.back();
  field.tolerance = tol;
  field.iterations = it + 1;
  field.method = "monotone";
  field.schedule = {eps};
  resolution_warning(field, eps);
  if (rep.sub_check.violations > 0) {
    field.warnings.push_back("subsolution sign check failed at " + std::to_string(rep.sub_check.violations) +
                             " nodes");
  }
  if (rep.super_check.violations > 0) {
    field.warnings.push_back("supersolution sign check failed at " +
                             std::to_string(rep.super_check.violations) + " nodes");
  }
  if (report) *report = rep;
  return field;
}

void background_gradient(const TorusField& field, Grid& gx, Grid& gy) {
  gx = Grid(field.domain);
  gy = Grid(field.domain);
  TorusGreen green(field.domain.L1(), field.domain.L2());
  for (const auto& node : field.nodes) {
    kernels::omp::accumulate_green_gradient(green, field.domain, node.p, node.weight(), gx, gy);
  }
}

double smooth_part_at_vortex(const TorusField& field, const VortexNode& node) {
  TorusGreen green(field.domain.L1(), field.domain.L2());
  double s = field.v[node.k] + node.weight() * field.gamma;
  for (const auto& other : field.nodes) {
    if (other.k == node.k) continue;
    s += other.weight() * green.value({node.p.x - other.p.x, node.p.y - other.p.y});
  }
  return s;
}

IdentityResult identity_check(const TorusField& field, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("identity_check: a must be positive");
  if (field.params.nonlinearity() != Nonlinearity::SigmaO3) {
    throw UnsupportedOperation("identity_check: defined for the sigma-model nonlinearity only");
  }
  const double tau = field.params.tau();
  const double eps = field.params.epsilon();
  const double inv_eps2 = 1.0 / (eps * eps);
  Spectral sp(field.domain);
  Grid vx, vy, bx, by;
  vx = Grid(field.domain);
  vy = Grid(field.domain);
  sp.gradient(field.v, vx, vy);
  background_gradient(field, bx, by);

  Grid node_value(field.domain, std::numeric_limits<double>::quiet_NaN());
  for (const auto& node : field.nodes) {
    double val = 0.0;
    if (node.multiplicity == 1) {
      const double s = smooth_part_at_vortex(field, node);
      val = node.sign > 0 ? (a + 1.0) * 4.0 * std::exp(s) / (a * a) : (a + 1.0) * 4.0 * std::exp(-s);
    }
    node_value[node.k] = val;
  }

  const double sum = kernels::omp::sum_map(field.v, [&](std::size_t k, double vv) {
    if (!std::isnan(node_value[k])) return node_value[k];
    const double u = field.u0[k] + vv;
    const double gx = vx[k] + bx[k];
    const double gy = vy[k] + by[k];
    const double g2 = gx * gx + gy * gy;
    double w1, w2;
    if (u <= 0.0) {
      const double t = std::exp(u);
      const double one_minus = -std::expm1(u);
      w1 = t / ((a + t) * (a + t));
      w2 = t * one_minus * one_minus / ((tau + t) * (tau + t) * (tau + t) * (a + t));
    } else {
      const double e = std::exp(-u);
      const double em1 = std::expm1(-u);
      const double dt = 1.0 + tau * e;
      w1 = e / ((1.0 + a * e) * (1.0 + a * e));
      w2 = e * em1 * em1 / (dt * dt * dt * (1.0 + a * e));
    }
    return (a + 1.0) * g2 * w1 + inv_eps2 * w2;
  });
  IdentityResult r;
  r.lhs = sum * field.domain.cell_area();
  r.rhs = kFourPi * (field.vortices.N1() / a + field.vortices.N2());
  r.rel_err = r.rhs != 0.0 ? std::abs(r.lhs - r.rhs) / std::abs(r.rhs) : std::abs(r.lhs);
  return r;
}

}  // namespace o3v
