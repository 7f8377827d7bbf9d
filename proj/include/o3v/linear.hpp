#pragma once

#include <cmath>

#include "o3v/grid.hpp"
#include "o3v/kernels.hpp"

namespace o3v {

struct LinearResult {
  bool converged = false;
  bool breakdown = false;
  int iterations = 0;
  double relative_residual = 0.0;
};

namespace linear_detail {

inline double norm2(const Grid& a) { return std::sqrt(kernels::omp::dot(a, a)); }

// y = a*x + b*y
inline void axpby(double a, const Grid& x, double b, Grid& y) {
  kernels::omp::map(y, y, [&](std::size_t k, double v) { return a * x[k] + b * v; });
}

}  // namespace linear_detail

/// Preconditioned conjugate gradients for a symmetric operator. Stops with
/// `breakdown` set if a non-positive curvature direction shows up, which
/// signals an indefinite operator.
template <class ApplyA, class ApplyM>
LinearResult pcg(ApplyA&& apply_a, ApplyM&& apply_m, const Grid& b, Grid& x, double rtol, int max_iter) {
  using linear_detail::axpby;
  using linear_detail::norm2;
  LinearResult res;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    x = Grid(b.n1(), b.n2());
    res.converged = true;
    return res;
  }
  Grid r(b.n1(), b.n2()), z(b.n1(), b.n2()), p(b.n1(), b.n2()), ap(b.n1(), b.n2());
  apply_a(x, ap);
  r = b;
  axpby(-1.0, ap, 1.0, r);
  apply_m(r, z);
  p = z;
  double rz = kernels::omp::dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    apply_a(p, ap);
    const double pap = kernels::omp::dot(p, ap);
    if (!(pap > 0.0) || !(rz > 0.0)) {
      res.breakdown = true;
      res.iterations = it;
      res.relative_residual = norm2(r) / bnorm;
      return res;
    }
    const double alpha = rz / pap;
    axpby(alpha, p, 1.0, x);
    axpby(-alpha, ap, 1.0, r);
    res.iterations = it;
    res.relative_residual = norm2(r) / bnorm;
    if (res.relative_residual < rtol) {
      res.converged = true;
      return res;
    }
    apply_m(r, z);
    const double rz_new = kernels::omp::dot(r, z);
    axpby(1.0, z, rz_new / rz, p);
    rz = rz_new;
  }
  return res;
}

/// Right-preconditioned BiCGSTAB for general (possibly indefinite) operators.
template <class ApplyA, class ApplyM>
LinearResult bicgstab(ApplyA&& apply_a, ApplyM&& apply_m, const Grid& b, Grid& x, double rtol, int max_iter) {
  using linear_detail::axpby;
  using linear_detail::norm2;
  LinearResult res;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    x = Grid(b.n1(), b.n2());
    res.converged = true;
    return res;
  }
  const int n1 = b.n1(), n2 = b.n2();
  Grid r(n1, n2), r0(n1, n2), p(n1, n2), v(n1, n2), s(n1, n2), t(n1, n2), y(n1, n2), zz(n1, n2);
  apply_a(x, v);
  r = b;
  axpby(-1.0, v, 1.0, r);
  r0 = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  v = Grid(n1, n2);
  p = Grid(n1, n2);
  for (int it = 1; it <= max_iter; ++it) {
    const double rho_new = kernels::omp::dot(r0, r);
    if (rho_new == 0.0 || omega == 0.0) {
      res.breakdown = true;
      res.iterations = it;
      return res;
    }
    const double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    // p = r + beta (p - omega v)
    axpby(-omega, v, 1.0, p);
    axpby(1.0, r, beta, p);
    apply_m(p, y);
    apply_a(y, v);
    const double r0v = kernels::omp::dot(r0, v);
    if (r0v == 0.0) {
      res.breakdown = true;
      res.iterations = it;
      return res;
    }
    alpha = rho / r0v;
    s = r;
    axpby(-alpha, v, 1.0, s);
    if (norm2(s) / bnorm < rtol) {
      axpby(alpha, y, 1.0, x);
      res.iterations = it;
      res.relative_residual = norm2(s) / bnorm;
      res.converged = true;
      return res;
    }
    apply_m(s, zz);
    apply_a(zz, t);
    const double tt = kernels::omp::dot(t, t);
    omega = tt == 0.0 ? 0.0 : kernels::omp::dot(t, s) / tt;
    axpby(alpha, y, 1.0, x);
    axpby(omega, zz, 1.0, x);
    r = s;
    axpby(-omega, t, 1.0, r);
    res.iterations = it;
    res.relative_residual = norm2(r) / bnorm;
    if (res.relative_residual < rtol) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

}  // namespace o3v
