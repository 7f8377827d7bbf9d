#pragma once

#include "o3v/grid.hpp"

namespace o3v {

struct Gradient2 {
  double x = 0.0;
  double y = 0.0;
};

/// Zero-mean Green's function of -Delta on the rectangular torus,
///   -Delta G = delta - 1/|Omega|,  int G = 0,
/// evaluated from its Fourier series sum_{k != 0} e^{ik.x}/(|Omega| |k|^2)
/// with one lattice direction summed in closed form. The remaining series
/// decays like exp(-2 pi k |y|/L1) (or the transposed rate), so every point
/// off the source converges geometrically.
class TorusGreen {
 public:
  TorusGreen(double L1, double L2);

  double L1() const noexcept { return L1_; }
  double L2() const noexcept { return L2_; }

  /// G at displacement d = x - y (any representative). +inf at d = 0.
  double value(Point2 d) const;
  /// grad_x G at displacement d. Throws DomainError at d = 0.
  Gradient2 gradient(Point2 d) const;
  /// Regular part gamma(p,p) = lim (G + ln|x-p| / 2 pi), independent of p.
  double regular_part_at_source() const;

 private:
  double L1_;
  double L2_;
  double gamma_;
};

struct GreenField {
  TorusDomain domain;
  Point2 source;               ///< snapped to the nearest node
  /// G(node, source) off the source. The source node holds minus the sum of
  /// all other nodes, so the grid mean is zero like the continuum mean.
  Grid values;
  double regular_part_at_source;
};

/// Samples G(., source) on the domain grid (source snapped to a node).
GreenField green_function(const TorusDomain& domain, Point2 source);

/// Snap a point to the nearest grid node; returns node indices.
std::pair<int, int> snap_to_node(const TorusDomain& domain, Point2 p);

}  // namespace o3v
