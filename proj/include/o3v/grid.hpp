#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "o3v/core_math.hpp"

namespace o3v {

/// Flat 2-torus [0,L1) x [0,L2) sampled on an n1 x n2 periodic grid.
/// Node (i, j) sits at (i*L1/n1, j*L2/n2). n1, n2 are powers of two >= 32.
class TorusDomain {
 public:
  TorusDomain(double L1, double L2, int n1, int n2);

  double L1() const noexcept { return L1_; }
  double L2() const noexcept { return L2_; }
  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n1_) * n2_; }
  double area() const noexcept { return L1_ * L2_; }
  double h1() const noexcept { return L1_ / n1_; }
  double h2() const noexcept { return L2_ / n2_; }
  double h() const noexcept { return h1() < h2() ? h1() : h2(); }
  double cell_area() const noexcept { return h1() * h2(); }

  Point2 node(int i, int j) const noexcept { return {i * h1(), j * h2()}; }
  std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(i) * n2_ + j; }

  /// Minimal-image displacement x - y, each component in [-L/2, L/2).
  Point2 displacement(Point2 x, Point2 y) const noexcept;
  double distance(Point2 x, Point2 y) const noexcept;

  TorusDomain refined(int factor) const { return {L1_, L2_, n1_ * factor, n2_ * factor}; }

  bool operator==(const TorusDomain&) const = default;

 private:
  double L1_;
  double L2_;
  int n1_;
  int n2_;
};

/// Row-major n1 x n2 array of doubles; element (i, j) at i*n2 + j.
class Grid {
 public:
  Grid() = default;
  Grid(int n1, int n2, double value = 0.0)
      : n1_(n1), n2_(n2), data_(static_cast<std::size_t>(n1) * n2, value) {}
  explicit Grid(const TorusDomain& d, double value = 0.0) : Grid(d.n1(), d.n2(), value) {}

  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * n2_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * n2_ + j]; }
  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::vector<double>& values() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  bool same_shape(const Grid& o) const noexcept { return n1_ == o.n1_ && n2_ == o.n2_; }

 private:
  int n1_ = 0;
  int n2_ = 0;
  std::vector<double> data_;
};

double max_abs(const Grid& g);
double max_abs_diff(const Grid& a, const Grid& b);

}  // namespace o3v
