#include "o3v/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "o3v/kernels.hpp"
#include "o3v/spectral.hpp"

namespace o3v {

namespace {

// -eps^{-2} f'(u) at every node.
Grid torus_potential(const TorusField& field) {
  const double eps = field.params.epsilon();
  Grid p = density_grid(field, Density::DF);
  kernels::serial::map(p, p, [&](std::size_t, double d) { return -d / (eps * eps); });
  return p;
}

void apply_op(Spectral& sp, const Grid& potential, const Grid& in, Grid& out) {
  sp.laplacian(in, out);
  kernels::serial::map(out, out, [&](std::size_t k, double lap) { return -lap + potential[k] * in[k]; });
}

double norm2(const Grid& a) { return std::sqrt(kernels::serial::dot(a, a)); }

// y += a x
void axpy(double a, const Grid& x, Grid& y) {
  kernels::serial::map(y, y, [&](std::size_t k, double v) { return v + a * x[k]; });
}

// Exact zeros (underflow far out in a decaying tail) are not sign changes.
bool no_sign_change(const std::vector<double>& v) {
  const bool pos = std::any_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
  const bool neg = std::any_of(v.begin(), v.end(), [](double x) { return x < 0.0; });
  return pos != neg;
}

// K - mu M with K, M symmetric tridiagonal / diagonal on the radial t-grid.
struct Pencil {
  std::vector<double> kd;  // diagonal of K
  double ko = 0.0;         // off-diagonal of K
  std::vector<double> m;   // diagonal of M
  std::size_t size() const { return kd.size(); }
};

double guard_pivot(double d, double scale) {
  if (d != 0.0) return d;
  return -std::numeric_limits<double>::epsilon() * (scale == 0.0 ? 1.0 : scale);
}

int negative_pivots(const Pencil& p, double mu) {
  int count = 0;
  double d = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double a = p.kd[k] - mu * p.m[k];
    d = k == 0 ? a : a - p.ko * p.ko / d;
    d = guard_pivot(d, std::abs(a) + std::abs(p.ko));
    if (d < 0.0) ++count;
  }
  return count;
}

// Solves (K - sigma M) x = b by the Thomas algorithm.
std::vector<double> solve_pencil(const Pencil& p, double sigma, const std::vector<double>& b) {
  const std::size_t n = p.size();
  std::vector<double> d(n), y(n), x(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = p.kd[k] - sigma * p.m[k];
    if (k == 0) {
      d[k] = guard_pivot(a, std::abs(a) + std::abs(p.ko));
      y[k] = b[k];
    } else {
      const double l = p.ko / d[k - 1];
      d[k] = guard_pivot(a - l * p.ko, std::abs(a) + std::abs(p.ko));
      y[k] = b[k] - l * y[k - 1];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    x[k] = (y[k] - (k + 1 < n ? p.ko * x[k + 1] : 0.0)) / d[k];
  }
  return x;
}

std::vector<double> apply_pencil(const Pencil& p, double mu, const std::vector<double>& x) {
  const std::size_t n = p.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = (p.kd[k] - mu * p.m[k]) * x[k];
    if (k > 0) s += p.ko * x[k - 1];
    if (k + 1 < n) s += p.ko * x[k + 1];
    out[k] = s;
  }
  return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Energy int psi_t^2 + r^2 V psi^2 dt and mass int r^2 w psi^2 dt on samples
// 0..n-1, psi_n = 0, natural condition at the inner end.
Pencil build_pencil(const RadialSolution& sol, std::size_t n) {
  const Kernel kernel = sol.kernel();
  const double dt = sol.dt;
  Pencil p;
  p.kd.resize(n);
  p.m.resize(n);
  p.ko = -1.0 / dt;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = sol.grid[k].r;
    const double u = sol.grid[k].u;
    const double q = k == 0 ? 0.5 : 1.0;
    const double links = k == 0 ? 1.0 : 2.0;
    const double V = -kernel.df(u);
    const double w = -std::expm1(u);
    p.kd[k] = links / dt + q * r * r * V * dt;
    p.m[k] = q * r * r * w * dt;
  }
  return p;
}

double lower_bound(const RadialSolution& sol, std::size_t n) {
  const Kernel kernel = sol.kernel();
  double lo = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = sol.grid[k].u;
    const double V = -kernel.df(u);
    const double w = -std::expm1(u);
    if (V < 0.0 && w > 0.0) lo = std::min(lo, V / w);
  }
  return 2.0 * lo - 1.0;
}

double smallest_eigenvalue(const Pencil& p, double lo, double rel_tol) {
  const int base = negative_pivots(p, lo);
  auto below = [&](double mu) { return negative_pivots(p, mu) - base; };
  double hi = 1.0;
  while (below(hi) < 1) {
    hi *= 2.0;
    if (hi > 1e300) throw NonConvergence("weighted_eigen_radial: no finite eigenvalue (weight vanishes)", hi);
  }
  for (int it = 0; it < 400 && hi - lo > rel_tol * std::max(1.0, std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (below(mid) >= 1) hi = mid;
    else lo = mid;
  }
  return 0.5 * (lo + hi);
}

std::size_t truncation_index(const RadialSolution& sol, double r_max) {
  std::size_t n = 0;
  while (n + 1 < sol.grid.size() && sol.grid[n + 1].r <= r_max * (1.0 + 1e-12)) ++n;
  return n;
}

}  // namespace

void apply_linearized(const TorusField& field, const Grid& in, Grid& out) {
  Spectral sp(field.domain);
  apply_op(sp, torus_potential(field), in, out);
}

EigenResult principal_eigen_torus(const TorusField& field, const TorusEigenOptions& opts) {
  const TorusDomain& d = field.domain;
  Spectral sp(d);
  const Grid potential = torus_potential(field);
  const double eps = field.params.epsilon();
  const double sigma = Kernel(field.params).sup_abs_df() / (eps * eps) + 1.0;

  Grid x(d, 1.0), ax(d), r(d), w(d), p(d), ap(d), aw(d);
  x = Grid(d, 1.0 / std::sqrt(static_cast<double>(d.size())));
  apply_op(sp, potential, x, ax);
  bool have_p = false;

  EigenResult res;
  double lambda = kernels::serial::dot(x, ax);
  double best = std::numeric_limits<double>::infinity();
  double best_rayleigh = lambda;
  int since_best = 0;
  for (int it = 0;; ++it) {
    lambda = kernels::serial::dot(x, ax);
    r = ax;
    axpy(-lambda, x, r);
    const double rn = norm2(r);
    res.iterations = it;
    if (rn < best) {
      best = rn;
      best_rayleigh = lambda;
      since_best = 0;
    } else if (++since_best > opts.stall_limit) {
      throw NonConvergence("principal_eigen_torus: stagnated", best_rayleigh);
    }
    if (rn < opts.tol * std::max(1.0, std::abs(lambda))) break;
    if (it >= opts.max_iterations) throw NonConvergence("principal_eigen_torus: iteration limit", best_rayleigh);

    sp.solve_shifted(r, w, sigma);
    std::vector<Grid*> basis{&x, &w};
    std::vector<Grid*> images{&ax, &aw};
    if (have_p) {
      basis.push_back(&p);
      images.push_back(&ap);
    }
    // Orthonormalize w (and p) against the earlier basis vectors.
    std::vector<Grid> q{x};
    for (std::size_t b = 1; b < basis.size(); ++b) {
      Grid v = *basis[b];
      const double before = norm2(v);
      for (int pass = 0; pass < 2; ++pass) {
        for (const Grid& e : q) axpy(-kernels::serial::dot(e, v), e, v);
      }
      const double after = norm2(v);
      if (!(after > 1e-10 * before)) continue;
      kernels::serial::map(v, v, [after](std::size_t, double t) { return t / after; });
      q.push_back(std::move(v));
    }
    std::vector<Grid> aq(q.size(), Grid(d));
    aq[0] = ax;
    for (std::size_t b = 1; b < q.size(); ++b) apply_op(sp, potential, q[b], aq[b]);
    const int m = static_cast<int>(q.size());
    Eigen::MatrixXd H(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = a; b < m; ++b) {
        const double h = 0.5 * (kernels::serial::dot(q[a], aq[b]) + kernels::serial::dot(q[b], aq[a]));
        H(a, b) = h;
        H(b, a) = h;
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const Eigen::VectorXd c = es.eigenvectors().col(0);
    Grid xn(d), axn(d), pn(d), apn(d);
    for (int a = 0; a < m; ++a) {
      axpy(c(a), q[a], xn);
      axpy(c(a), aq[a], axn);
      if (a > 0) {
        axpy(c(a), q[a], pn);
        axpy(c(a), aq[a], apn);
      }
    }
    const double xnorm = norm2(xn);
    kernels::serial::map(xn, xn, [xnorm](std::size_t, double t) { return t / xnorm; });
    kernels::serial::map(axn, axn, [xnorm](std::size_t, double t) { return t / xnorm; });
    x = std::move(xn);
    ax = std::move(axn);
    have_p = m > 1;
    if (have_p) {
      p = std::move(pn);
      ap = std::move(apn);
    }
  }

  res.eigenvalue = lambda;
  apply_op(sp, potential, x, ax);
  const double xx = kernels::serial::dot(x, x);
  res.rayleigh = kernels::serial::dot(x, ax) / xx;
  r = ax;
  axpy(-res.eigenvalue, x, r);
  res.residual_norm = norm2(r) / std::sqrt(xx);
  res.tolerance = opts.tol * std::max(1.0, std::abs(res.eigenvalue));
  res.eigenvector = x.values();
  const double s = kernels::serial::sum(x);
  const double scale = (s < 0.0 ? -1.0 : 1.0) / std::sqrt(xx * d.cell_area());
  for (double& v : res.eigenvector) v *= scale;
  res.positive = no_sign_change(res.eigenvector);
  return res;
}

EigenResult weighted_eigen_radial(const RadialSolution& sol, const RadialEigenOptions& opts) {
  if (sol.grid.size() < 8 || !(sol.dt > 0.0)) {
    throw std::invalid_argument("weighted_eigen_radial: profile has too few samples");
  }
  const double r_end = opts.r_max.value_or(sol.grid.back().r);
  if (!(r_end > sol.grid.front().r)) throw std::invalid_argument("weighted_eigen_radial: r_max inside the core");
  const std::size_t n = truncation_index(sol, r_end);
  const std::size_t n_half = truncation_index(sol, 0.5 * r_end);
  if (n_half < 4) throw std::invalid_argument("weighted_eigen_radial: r_max too small");
  for (std::size_t k = 0; k < n; ++k) {
    const double w = -std::expm1(sol.grid[k].u);
    if (w < 0.0) {
      throw WeightIndefinite("weighted_eigen_radial: weight 1 - e^u is negative at r = " +
                             std::to_string(sol.grid[k].r));
    }
  }

  const Pencil pen = build_pencil(sol, n);
  const double mu = smallest_eigenvalue(pen, lower_bound(sol, n), opts.bisection_tol);

  // Inverse iteration for the eigenvector.
  std::vector<double> x(n, 1.0);
  const double shift = mu - 1e-10 * std::max(1.0, std::abs(mu));
  for (int it = 0; it < opts.inverse_iterations; ++it) {
    std::vector<double> b(n);
    for (std::size_t k = 0; k < n; ++k) b[k] = pen.m[k] * x[k];
    x = solve_pencil(pen, shift, b);
    double mx = 0.0;
    for (double v : x) mx = std::max(mx, std::abs(v));
    for (double& v : x) v /= mx;
  }

  EigenResult res;
  res.eigenvalue = mu;
  res.iterations = opts.inverse_iterations;
  const std::vector<double> kx = apply_pencil(pen, 0.0, x);
  std::vector<double> mx(n);
  for (std::size_t k = 0; k < n; ++k) mx[k] = pen.m[k] * x[k];
  res.rayleigh = dot(x, kx) / dot(x, mx);
  std::vector<double> rr(n);
  for (std::size_t k = 0; k < n; ++k) rr[k] = kx[k] - mu * mx[k];
  res.residual_norm = std::sqrt(dot(rr, rr)) / (std::sqrt(dot(kx, kx)) + std::abs(mu) * std::sqrt(dot(mx, mx)));
  res.tolerance = 1e-8;

  // L2(R^2) normalization: int psi^2 dx = 2 pi sum q r^2 psi^2 dt.
  double l2 = 0.0, s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r = sol.grid[k].r;
    l2 += (k == 0 ? 0.5 : 1.0) * r * r * x[k] * x[k] * sol.dt;
    s += x[k];
  }
  const double scale = (s < 0.0 ? -1.0 : 1.0) / std::sqrt(2.0 * std::numbers::pi * l2);
  for (double& v : x) v *= scale;
  res.eigenvector = std::move(x);
  res.positive = no_sign_change(res.eigenvector);

  const Pencil half = build_pencil(sol, n_half);
  const double mu_half = smallest_eigenvalue(half, lower_bound(sol, n_half), opts.bisection_tol);
  const double sens = std::abs(mu - mu_half) / std::max(std::abs(mu), std::numeric_limits<double>::min());
  res.sensitivity = sens;
  res.reliable = sens < opts.sensitivity_limit;
  if (!res.reliable) res.warnings.push_back("Unreliable: mu* changes by more than 5% when r_max doubles");
  return res;
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::StrictlyStable: return "StrictlyStable";
    case Stability::Marginal: return "Marginal";
    case Stability::Unstable: return "Unstable";
  }
  return "?";
}

Stability classify_stability(const EigenResult& result, double margin) {
  if (result.eigenvalue < -margin) return Stability::Unstable;
  if (result.eigenvalue > margin) return Stability::StrictlyStable;
  return Stability::Marginal;
}

double default_margin(double epsilon) { return 1e-8 / (epsilon * epsilon); }

std::vector<Stability> classify_batch(const std::vector<EigenResult>& results, double margin) {
  std::vector<Stability> out(results.size());
#pragma omp parallel for schedule(static)
  for (std::size_t k = 0; k < results.size(); ++k) out[k] = classify_stability(results[k], margin);
  return out;
}

}  // namespace o3v
