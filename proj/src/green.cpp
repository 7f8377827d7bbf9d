#include "o3v/green.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "o3v/errors.hpp"
#include "o3v/kernels.hpp"

namespace o3v {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSeriesTol = 1e-18;
constexpr int kMaxTerms = 2'000'000;

double wrap_half(double d, double L) {
  d = std::fmod(d, L);
  if (d >= 0.5 * L) d -= L;
  if (d < -0.5 * L) d += L;
  return d;
}

// Series with the sum over the period-Lp direction (coordinate P) done
// termwise and the orthogonal direction (coordinate Q, period Lq) in closed
// form. Requires Q != 0.
double value_series(double P, double Q, double Lp, double Lq) {
  const double aq = std::abs(Q);
  double sum = (0.5 * Q * Q - 0.5 * Lq * aq + Lq * Lq / 12.0) / (Lp * Lq);
  const double step = kTwoPi / Lp;
  const double q_near = std::exp(-step * aq);
  const double q_far = std::exp(-step * (Lq - aq));
  const double q_per = std::exp(-step * Lq);
  double near = 1.0, far = 1.0, per = 1.0;
  double series = 0.0;
  for (int k = 1; k <= kMaxTerms; ++k) {
    near *= q_near;
    far *= q_far;
    per *= q_per;
    const double a = step * k;
    const double mag = (near + far) / (a * (1.0 - per));
    series += std::cos(a * P) * mag;
    if (mag < kSeriesTol * (1.0 + std::abs(series))) break;
  }
  return sum + series / Lp;
}

// Gradient (d/dP, d/dQ) of value_series.
Gradient2 gradient_series(double P, double Q, double Lp, double Lq) {
  const double aq = std::abs(Q);
  const double sq = Q >= 0.0 ? 1.0 : -1.0;
  double gq = (Q - 0.5 * Lq * sq) / (Lp * Lq);
  double gp = 0.0;
  const double step = kTwoPi / Lp;
  const double q_near = std::exp(-step * aq);
  const double q_far = std::exp(-step * (Lq - aq));
  const double q_per = std::exp(-step * Lq);
  double near = 1.0, far = 1.0, per = 1.0;
  double sp = 0.0, sqs = 0.0;
  for (int k = 1; k <= kMaxTerms; ++k) {
    near *= q_near;
    far *= q_far;
    per *= q_per;
    const double a = step * k;
    const double denom = 1.0 - per;
    sp += -std::sin(a * P) * (near + far) / denom;
    sqs += std::cos(a * P) * sq * (far - near) / denom;
    if ((near + far) / denom < kSeriesTol * (1.0 + std::abs(sp) + std::abs(sqs))) break;
  }
  gp += sp / Lp;
  gq += sqs / Lp;
  return {gp, gq};
}

}  // namespace

TorusGreen::TorusGreen(double L1, double L2) : L1_(L1), L2_(L2) {
  if (!(L1 > 0.0) || !(L2 > 0.0)) throw std::invalid_argument("TorusGreen: periods must be positive");
  // gamma - |x-p|^2/(4|Omega|) is harmonic near p, so its circle mean equals
  // its value at p.
  const double r = 0.05 * std::min(L1, L2);
  const int m = 64;
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double th = kTwoPi * i / m;
    acc += value({r * std::cos(th), r * std::sin(th)});
  }
  gamma_ = acc / m + std::log(r) / kTwoPi - r * r / (4.0 * L1 * L2);
}

double TorusGreen::value(Point2 d) const {
  const double X = wrap_half(d.x, L1_);
  const double Y = wrap_half(d.y, L2_);
  if (X == 0.0 && Y == 0.0) return std::numeric_limits<double>::infinity();
  if (std::abs(Y) / L1_ >= std::abs(X) / L2_) return value_series(X, Y, L1_, L2_);
  return value_series(Y, X, L2_, L1_);
}

Gradient2 TorusGreen::gradient(Point2 d) const {
  const double X = wrap_half(d.x, L1_);
  const double Y = wrap_half(d.y, L2_);
  if (X == 0.0 && Y == 0.0) throw DomainError("TorusGreen::gradient: evaluated at the source");
  if (std::abs(Y) / L1_ >= std::abs(X) / L2_) return gradient_series(X, Y, L1_, L2_);
  const Gradient2 g = gradient_series(Y, X, L2_, L1_);
  return {g.y, g.x};
}

double TorusGreen::regular_part_at_source() const { return gamma_; }

std::pair<int, int> snap_to_node(const TorusDomain& domain, Point2 p) {
  auto idx = [](double x, double h, int n) {
    long k = std::lround(x / h);
    k %= n;
    if (k < 0) k += n;
    return static_cast<int>(k);
  };
  return {idx(p.x, domain.h1(), domain.n1()), idx(p.y, domain.h2(), domain.n2())};
}

GreenField green_function(const TorusDomain& domain, Point2 source) {
  const auto [i, j] = snap_to_node(domain, source);
  const Point2 snapped = domain.node(i, j);
  TorusGreen green(domain.L1(), domain.L2());
  Grid values(domain);
  kernels::omp::accumulate_green(green, domain, snapped, 1.0, values);
  values(i, j) = 0.0;
  values(i, j) = -kernels::omp::sum(values);
  return GreenField{domain, snapped, std::move(values), green.regular_part_at_source()};
}

}  // namespace o3v
