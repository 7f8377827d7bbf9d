#include "o3v/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace o3v {

namespace {
// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Spectral::Plans {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  Plans(int n1, int n2) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    real = fftw_alloc_real(static_cast<std::size_t>(n1) * n2);
    cplx = fftw_alloc_complex(static_cast<std::size_t>(n1) * (n2 / 2 + 1));
    // FFTW_ESTIMATE keeps the algorithm choice, and therefore the rounding,
    // identical from run to run.
    fwd = fftw_plan_dft_r2c_2d(n1, n2, real, cplx, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_2d(n1, n2, cplx, real, FFTW_ESTIMATE);
  }
  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(real);
    fftw_free(cplx);
  }
};

Spectral::Spectral(const TorusDomain& domain)
    : domain_(domain),
      plans_(std::make_unique<Plans>(domain.n1(), domain.n2())),
      scratch_(spectrum_size()),
      scratch2_(spectrum_size()) {}

Spectral::~Spectral() = default;
Spectral::Spectral(Spectral&&) noexcept = default;
Spectral& Spectral::operator=(Spectral&&) noexcept = default;

std::size_t Spectral::spectrum_size() const noexcept {
  return static_cast<std::size_t>(domain_.n1()) * (domain_.n2() / 2 + 1);
}

double Spectral::k1(int i) const noexcept {
  const int n = domain_.n1();
  const int m = i <= n / 2 ? i : i - n;
  return 2.0 * std::numbers::pi * m / domain_.L1();
}

double Spectral::k2(int j) const noexcept { return 2.0 * std::numbers::pi * j / domain_.L2(); }

void Spectral::forward(const Grid& in, Spectrum& out) {
  const std::size_t n = domain_.size();
  std::copy(in.data(), in.data() + n, plans_->real);
  fftw_execute(plans_->fwd);
  out.resize(spectrum_size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {plans_->cplx[k][0], plans_->cplx[k][1]};
}

void Spectral::inverse(const Spectrum& in, Grid& out) {
  for (std::size_t k = 0; k < in.size(); ++k) {
    plans_->cplx[k][0] = in[k].real();
    plans_->cplx[k][1] = in[k].imag();
  }
  fftw_execute(plans_->bwd);
  const std::size_t n = domain_.size();
  const double scale = 1.0 / static_cast<double>(n);
  if (out.size() != n) out = Grid(domain_);
  for (std::size_t k = 0; k < n; ++k) out[k] = plans_->real[k] * scale;
}

void Spectral::laplacian(const Grid& in, Grid& out) {
  apply_symbol(in, out, [](double k2) { return -k2; });
}

void Spectral::gradient(const Grid& in, Grid& gx, Grid& gy) {
  forward(in, scratch_);
  scratch2_ = scratch_;
  const int h2 = half_n2();
  const int n1 = domain_.n1();
  const int n2 = domain_.n2();
  for (int i = 0; i < n1; ++i) {
    const double a = (i == n1 / 2) ? 0.0 : k1(i);
    for (int j = 0; j < h2; ++j) {
      const double b = (j == n2 / 2) ? 0.0 : k2(j);
      const std::size_t k = static_cast<std::size_t>(i) * h2 + j;
      scratch_[k] *= std::complex<double>(0.0, a);
      scratch2_[k] *= std::complex<double>(0.0, b);
    }
  }
  inverse(scratch_, gx);
  inverse(scratch2_, gy);
}

void Spectral::solve_shifted(const Grid& in, Grid& out, double sigma) {
  apply_symbol(in, out, [sigma](double k2) {
    const double d = k2 + sigma;
    return d == 0.0 ? 0.0 : 1.0 / d;
  });
}

FourierInterpolant::FourierInterpolant(Spectral& spectral, const Grid& values)
    : domain_(spectral.domain()) {
  spectral.forward(values, hat_);
  const int n1 = domain_.n1();
  const int h2 = spectral.half_n2();
  const double scale = 1.0 / static_cast<double>(domain_.size());
  for (auto& c : hat_) c *= scale;
  k1_.resize(n1);
  k2_.resize(h2);
  for (int i = 0; i < n1; ++i) k1_[i] = spectral.k1(i);
  for (int j = 0; j < h2; ++j) k2_[j] = spectral.k2(j);
}

// The half spectrum stores k2 >= 0. Interior k2 columns stand for +/-k2 and
// are doubled; the k2 = 0 and Nyquist columns are counted once. Nyquist
// modes are taken as cosines (the symmetric, real interpolant).
double FourierInterpolant::value(Point2 x) const {
  const int n1 = domain_.n1();
  const int n2 = domain_.n2();
  const int h2 = n2 / 2 + 1;
  std::vector<std::complex<double>> ey(h2);
  for (int j = 0; j < h2; ++j) {
    const double w = (j == 0 || j == n2 / 2) ? 1.0 : 2.0;
    if (j == n2 / 2) {
      ey[j] = w * std::cos(k2_[j] * x.y);
    } else {
      ey[j] = w * std::polar(1.0, k2_[j] * x.y);
    }
  }
  double acc = 0.0;
  for (int i = 0; i < n1; ++i) {
    std::complex<double> row = 0.0;
    const std::size_t base = static_cast<std::size_t>(i) * h2;
    for (int j = 0; j < h2; ++j) row += hat_[base + j] * ey[j];
    if (i == n1 / 2) {
      acc += (row * std::cos(k1_[i] * x.x)).real();
    } else {
      acc += (row * std::polar(1.0, k1_[i] * x.x)).real();
    }
  }
  return acc;
}

Gradient2 FourierInterpolant::gradient(Point2 x) const {
  const int n1 = domain_.n1();
  const int n2 = domain_.n2();
  const int h2 = n2 / 2 + 1;
  std::vector<std::complex<double>> ey(h2), dey(h2);
  for (int j = 0; j < h2; ++j) {
    if (j == n2 / 2) {
      ey[j] = 0.0;
      dey[j] = 0.0;
      continue;
    }
    const double w = (j == 0) ? 1.0 : 2.0;
    ey[j] = w * std::polar(1.0, k2_[j] * x.y);
    dey[j] = std::complex<double>(0.0, k2_[j]) * ey[j];
  }
  double gx = 0.0, gy = 0.0;
  for (int i = 0; i < n1; ++i) {
    if (i == n1 / 2) continue;
    std::complex<double> row = 0.0, drow = 0.0;
    const std::size_t base = static_cast<std::size_t>(i) * h2;
    for (int j = 0; j < h2; ++j) {
      row += hat_[base + j] * ey[j];
      drow += hat_[base + j] * dey[j];
    }
    const std::complex<double> ex = std::polar(1.0, k1_[i] * x.x);
    gx += (row * std::complex<double>(0.0, k1_[i]) * ex).real();
    gy += (drow * ex).real();
  }
  return {gx, gy};
}

}  // namespace o3v
