#pragma once

// Data-parallel grid kernels. Every kernel exists twice with identical
// signatures: `serial` (reference, used by tests) and `omp` (OpenMP, used by
// the solvers). Reductions sum each grid row into its own slot and then add
// the row partials in index order, so both variants give bit-identical
// results regardless of the thread count.

#include <cmath>
#include <limits>
#include <vector>

#include "o3v/green.hpp"
#include "o3v/grid.hpp"

namespace o3v::kernels {

namespace detail {

inline double sum_rows(const std::vector<double>& rows) {
  double s = 0.0;
  for (double r : rows) s += r;
  return s;
}

// weight * G(node - src) into out; the source node receives +/-inf.
inline void green_row(const TorusGreen& g, const TorusDomain& d, Point2 src, double weight, Grid& out,
                      int i) {
  for (int j = 0; j < d.n2(); ++j) {
    const Point2 x = d.node(i, j);
    const double gv = g.value({x.x - src.x, x.y - src.y});
    if (std::isinf(gv)) {
      out(i, j) = weight > 0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
    } else {
      out(i, j) += weight * gv;
    }
  }
}

// weight * grad G(node - src) into (gx, gy); the source node is skipped.
inline void green_gradient_row(const TorusGreen& g, const TorusDomain& d, Point2 src, double weight,
                               Grid& gx, Grid& gy, int i) {
  for (int j = 0; j < d.n2(); ++j) {
    const Point2 x = d.node(i, j);
    const Point2 r{x.x - src.x, x.y - src.y};
    if (r.x == 0.0 && r.y == 0.0) continue;
    const Gradient2 gr = g.gradient(r);
    gx(i, j) += weight * gr.x;
    gy(i, j) += weight * gr.y;
  }
}

}  // namespace detail

namespace serial {

inline void accumulate_green(const TorusGreen& g, const TorusDomain& d, Point2 src, double weight,
                             Grid& out) {
  for (int i = 0; i < d.n1(); ++i) detail::green_row(g, d, src, weight, out, i);
}

inline void accumulate_green_gradient(const TorusGreen& g, const TorusDomain& d, Point2 src,
                                      double weight, Grid& gx, Grid& gy) {
  for (int i = 0; i < d.n1(); ++i) detail::green_gradient_row(g, d, src, weight, gx, gy, i);
}

/// out[k] = fn(k, a[k]) for every node.
template <class Fn>
void map(const Grid& a, Grid& out, Fn fn) {
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = fn(k, a[k]);
}

/// Deterministic sum over nodes of fn(k, a[k]).
template <class Fn>
double sum_map(const Grid& a, Fn fn) {
  std::vector<double> rows(a.n1(), 0.0);
  for (int i = 0; i < a.n1(); ++i) {
    double s = 0.0;
    const std::size_t base = static_cast<std::size_t>(i) * a.n2();
    for (int j = 0; j < a.n2(); ++j) s += fn(base + j, a[base + j]);
    rows[i] = s;
  }
  return detail::sum_rows(rows);
}

inline double sum(const Grid& a) {
  return sum_map(a, [](std::size_t, double v) { return v; });
}

inline double dot(const Grid& a, const Grid& b) {
  return sum_map(a, [&b](std::size_t k, double v) { return v * b[k]; });
}

inline double max_abs(const Grid& a) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k]));
  return m;
}

}  // namespace serial

namespace omp {

inline void accumulate_green(const TorusGreen& g, const TorusDomain& d, Point2 src, double weight,
                             Grid& out) {
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < d.n1(); ++i) detail::green_row(g, d, src, weight, out, i);
}

inline void accumulate_green_gradient(const TorusGreen& g, const TorusDomain& d, Point2 src,
                                      double weight, Grid& gx, Grid& gy) {
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < d.n1(); ++i) detail::green_gradient_row(g, d, src, weight, gx, gy, i);
}

template <class Fn>
void map(const Grid& a, Grid& out, Fn fn) {
  const long n = static_cast<long>(a.size());
#pragma omp parallel for schedule(static)
  for (long k = 0; k < n; ++k) out[k] = fn(static_cast<std::size_t>(k), a[k]);
}

template <class Fn>
double sum_map(const Grid& a, Fn fn) {
  std::vector<double> rows(a.n1(), 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.n1(); ++i) {
    double s = 0.0;
    const std::size_t base = static_cast<std::size_t>(i) * a.n2();
    for (int j = 0; j < a.n2(); ++j) s += fn(base + j, a[base + j]);
    rows[i] = s;
  }
  return detail::sum_rows(rows);
}

inline double sum(const Grid& a) {
  return sum_map(a, [](std::size_t, double v) { return v; });
}

inline double dot(const Grid& a, const Grid& b) {
  return sum_map(a, [&b](std::size_t k, double v) { return v * b[k]; });
}

inline double max_abs(const Grid& a) {
  double m = 0.0;
  const long n = static_cast<long>(a.size());
#pragma omp parallel for reduction(max : m) schedule(static)
  for (long k = 0; k < n; ++k) m = std::max(m, std::abs(a[k]));
  return m;
}

}  // namespace omp

}  // namespace o3v::kernels
