#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "o3v/green.hpp"
#include "o3v/grid.hpp"

namespace o3v {

using Spectrum = std::vector<std::complex<double>>;

/// FFT-based periodic operators on one TorusDomain. Owns FFTW plans and
/// scratch buffers, so an instance must not be shared between threads.
class Spectral {
 public:
  explicit Spectral(const TorusDomain& domain);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;
  Spectral(Spectral&&) noexcept;
  Spectral& operator=(Spectral&&) noexcept;

  const TorusDomain& domain() const noexcept { return domain_; }

  /// Half spectrum, layout n1 x (n2/2+1), unnormalized.
  void forward(const Grid& in, Spectrum& out);
  /// Inverse of forward (includes the 1/(n1 n2) normalization).
  void inverse(const Spectrum& in, Grid& out);

  std::size_t spectrum_size() const noexcept;
  int half_n2() const noexcept { return domain_.n2() / 2 + 1; }
  double k1(int i) const noexcept;
  double k2(int j) const noexcept;

  void laplacian(const Grid& in, Grid& out);
  /// Spectral gradient; Nyquist modes are dropped.
  void gradient(const Grid& in, Grid& gx, Grid& gy);
  /// out = (-Delta + sigma)^{-1} in. With sigma == 0 the zero mode is
  /// projected out (mean-zero pseudo-inverse).
  void solve_shifted(const Grid& in, Grid& out, double sigma);
  /// out = F^{-1}[ symbol(|k|^2) F[in] ].
  template <class Symbol>
  void apply_symbol(const Grid& in, Grid& out, Symbol symbol) {
    forward(in, scratch_);
    const int h2 = half_n2();
    for (int i = 0; i < domain_.n1(); ++i) {
      const double a = k1(i);
      for (int j = 0; j < h2; ++j) {
        const double b = k2(j);
        scratch_[static_cast<std::size_t>(i) * h2 + j] *= symbol(a * a + b * b);
      }
    }
    inverse(scratch_, out);
  }

 private:
  struct Plans;
  TorusDomain domain_;
  std::unique_ptr<Plans> plans_;
  Spectrum scratch_;
  Spectrum scratch2_;
};

/// Trigonometric interpolant of grid data, evaluable anywhere on the torus.
class FourierInterpolant {
 public:
  FourierInterpolant(Spectral& spectral, const Grid& values);

  double value(Point2 x) const;
  Gradient2 gradient(Point2 x) const;

 private:
  TorusDomain domain_;
  Spectrum hat_;
  std::vector<double> k1_;
  std::vector<double> k2_;
};

}  // namespace o3v
