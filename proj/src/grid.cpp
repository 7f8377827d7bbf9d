#include "o3v/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace o3v {

namespace {
bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

double wrap_half(double d, double L) {
  d = std::fmod(d, L);
  if (d >= 0.5 * L) d -= L;
  if (d < -0.5 * L) d += L;
  return d;
}
}  // namespace

TorusDomain::TorusDomain(double L1, double L2, int n1, int n2) : L1_(L1), L2_(L2), n1_(n1), n2_(n2) {
  if (!(L1 > 0.0) || !(L2 > 0.0)) throw std::invalid_argument("TorusDomain: periods must be positive");
  if (!is_pow2(n1) || !is_pow2(n2) || n1 < 32 || n2 < 32) {
    throw std::invalid_argument("TorusDomain: grid sizes must be powers of two >= 32, got " +
                                std::to_string(n1) + "x" + std::to_string(n2));
  }
}

Point2 TorusDomain::displacement(Point2 x, Point2 y) const noexcept {
  return {wrap_half(x.x - y.x, L1_), wrap_half(x.y - y.y, L2_)};
}

double TorusDomain::distance(Point2 x, Point2 y) const noexcept {
  const Point2 d = displacement(x, y);
  return std::hypot(d.x, d.y);
}

double max_abs(const Grid& g) {
  double m = 0.0;
  for (double v : g.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Grid& a, const Grid& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace o3v
