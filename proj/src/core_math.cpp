#include "o3v/core_math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "o3v/errors.hpp"

namespace o3v {

namespace {

void require_finite(double u, const char* who) {
  if (!std::isfinite(u)) {
    throw DomainError(std::string(who) + ": non-finite argument");
  }
}

void require_tau(double tau, const char* who) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw DomainError(std::string(who) + ": tau must be positive and finite");
  }
}

// Largest u for which e^{2u} is representable; beyond it the CSH kernels
// have no double-precision value.
constexpr double kCshMaxExponent = 354.0;

}  // namespace

std::string to_string(Nonlinearity n) {
  return n == Nonlinearity::SigmaO3 ? "sigma_o3" : "csh";
}

Nonlinearity nonlinearity_from_string(const std::string& name) {
  if (name == "sigma_o3" || name == "SigmaO3") return Nonlinearity::SigmaO3;
  if (name == "csh" || name == "CSH") return Nonlinearity::CSH;
  throw std::invalid_argument("unknown nonlinearity '" + name + "'");
}

ModelParams::ModelParams(double tau, double epsilon, Nonlinearity nonlinearity)
    : tau_(tau), epsilon_(epsilon), nonlinearity_(nonlinearity) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("ModelParams: tau must be > 0");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("ModelParams: epsilon must be > 0");
  }
}

// For u <= 0 we use t = e^u in (0, 1]; for u > 0 every formula is rewritten
// in e = e^{-u} in (0, 1). Both branches are exact, not asymptotic.

double f_tau(double u, double tau) {
  require_finite(u, "f_tau");
  require_tau(tau, "f_tau");
  if (u <= 0.0) {
    const double t = std::exp(u);
    const double d = tau + t;
    return t * (-std::expm1(u)) / (d * d * d);
  }
  const double e = std::exp(-u);
  const double d = 1.0 + tau * e;
  return std::expm1(-u) * e / (d * d * d);
}

double df_tau(double u, double tau) {
  require_finite(u, "df_tau");
  require_tau(tau, "df_tau");
  if (u <= 0.0) {
    const double t = std::exp(u);
    const double d = tau + t;
    const double d2 = d * d;
    return t * (tau - 2.0 * (tau + 1.0) * t + t * t) / (d2 * d2);
  }
  const double e = std::exp(-u);
  const double d = 1.0 + tau * e;
  const double d2 = d * d;
  return e * (tau * e * e - 2.0 * (tau + 1.0) * e + 1.0) / (d2 * d2);
}

double F1_tau(double u, double tau) {
  require_finite(u, "F1_tau");
  require_tau(tau, "F1_tau");
  if (u <= 0.0) {
    const double t = std::exp(u);
    const double a = std::expm1(u);
    const double d = tau + t;
    return -(a * a) / (2.0 * (tau + 1.0) * d * d);
  }
  const double e = std::exp(-u);
  const double a = std::expm1(-u);
  const double d = 1.0 + tau * e;
  return -(a * a) / (2.0 * (tau + 1.0) * d * d);
}

double F2_tau(double u, double tau) {
  require_finite(u, "F2_tau");
  require_tau(tau, "F2_tau");
  if (u <= 0.0) {
    const double t = std::exp(u);
    const double d = tau + t;
    return t * ((1.0 - tau) * t + 2.0 * tau) / (2.0 * tau * tau * d * d);
  }
  const double e = std::exp(-u);
  const double d = 1.0 + tau * e;
  return ((1.0 - tau) + 2.0 * tau * e) / (2.0 * tau * tau * d * d);
}

double quantization_density(double u, double tau) {
  require_finite(u, "quantization_density");
  require_tau(tau, "quantization_density");
  if (u <= 0.0) {
    const double a = std::expm1(u);
    const double d = tau + std::exp(u);
    return (a * a) / (d * d);
  }
  const double e = std::exp(-u);
  const double a = std::expm1(-u);
  const double d = 1.0 + tau * e;
  return (a * a) / (d * d);
}

double sup_abs_df_tau(double tau) {
  require_tau(tau, "sup_abs_df_tau");
  // |f'| decays like e^{-|u|} in both tails; the extremum sits in |u| < 40.
  double best_u = 0.0;
  double best = 0.0;
  const int n = 8000;
  for (int i = 0; i <= n; ++i) {
    const double u = -40.0 + 80.0 * i / n;
    const double v = std::abs(df_tau(u, tau));
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  double a = best_u - 0.02;
  double b = best_u + 0.02;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  for (int it = 0; it < 80; ++it) {
    if (std::abs(df_tau(c, tau)) > std::abs(df_tau(d, tau))) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return std::max(best, std::abs(df_tau(0.5 * (a + b), tau)));
}

double Kernel::f(double u) const {
  if (kind_ == Nonlinearity::SigmaO3) return f_tau(u, tau_);
  require_finite(u, "csh f");
  if (u > kCshMaxExponent) throw std::overflow_error("csh f: e^{2u} overflows");
  return std::exp(u) * (-std::expm1(u));
}

double Kernel::df(double u) const {
  if (kind_ == Nonlinearity::SigmaO3) return df_tau(u, tau_);
  require_finite(u, "csh df");
  if (u > kCshMaxExponent) throw std::overflow_error("csh df: e^{2u} overflows");
  const double t = std::exp(u);
  return t * (1.0 - 2.0 * t);
}

double Kernel::F1(double u) const {
  if (kind_ == Nonlinearity::SigmaO3) return F1_tau(u, tau_);
  require_finite(u, "csh F1");
  if (u > kCshMaxExponent) throw std::overflow_error("csh F1: e^{2u} overflows");
  const double a = std::expm1(u);
  return -0.5 * a * a;
}

double Kernel::F2(double u) const {
  if (kind_ != Nonlinearity::SigmaO3) {
    throw UnsupportedOperation("F2_tau is tau-dependent and undefined in CSH mode");
  }
  return F2_tau(u, tau_);
}

double Kernel::quantization(double u) const {
  if (kind_ == Nonlinearity::SigmaO3) return quantization_density(u, tau_);
  require_finite(u, "csh quantization");
  if (u > kCshMaxExponent) throw std::overflow_error("csh quantization: e^{2u} overflows");
  const double a = std::expm1(u);
  return a * a;
}

double Kernel::f_limit(int) const { return 0.0; }
double Kernel::df_limit(int) const { return 0.0; }

double Kernel::F1_limit(int sign) const {
  if (kind_ == Nonlinearity::CSH) {
    if (sign > 0) throw std::overflow_error("csh F1 diverges at +inf");
    return -0.5;
  }
  return sign < 0 ? -1.0 / (2.0 * (tau_ + 1.0) * tau_ * tau_) : -1.0 / (2.0 * (tau_ + 1.0));
}

double Kernel::F2_limit(int sign) const {
  if (kind_ != Nonlinearity::SigmaO3) {
    throw UnsupportedOperation("F2_tau is tau-dependent and undefined in CSH mode");
  }
  return sign < 0 ? 0.0 : (1.0 - tau_) / (2.0 * tau_ * tau_);
}

double Kernel::quantization_limit(int sign) const {
  if (kind_ == Nonlinearity::CSH) {
    if (sign > 0) throw std::overflow_error("csh quantization diverges at +inf");
    return 1.0;
  }
  return sign < 0 ? 1.0 / (tau_ * tau_) : 1.0;
}

double Kernel::df_at_zero() const {
  if (kind_ == Nonlinearity::CSH) return -1.0;
  const double d = tau_ + 1.0;
  return -1.0 / (d * d * d);
}

double Kernel::sup_abs_df() const {
  if (kind_ == Nonlinearity::CSH) {
    // e^u(1-2e^u) on u <= kCshMaxExponent is unbounded; callers only use this
    // for sub/supersolutions with u <= 0, where the sup is 1 at u = 0.
    return 1.0;
  }
  return sup_abs_df_tau(tau_);
}

void VortexSet::add_positive(Point2 p, int m) {
  if (m < 0) throw std::invalid_argument("VortexSet: multiplicity must be >= 0");
  positive_.push_back({p, m});
  recount();
}

void VortexSet::add_negative(Point2 p, int m) {
  if (m < 0) throw std::invalid_argument("VortexSet: multiplicity must be >= 0");
  negative_.push_back({p, m});
  recount();
}

const Vortex& VortexSet::at(std::size_t id, int* sign) const {
  if (id < positive_.size()) {
    if (sign) *sign = +1;
    return positive_[id];
  }
  id -= positive_.size();
  if (id < negative_.size()) {
    if (sign) *sign = -1;
    return negative_[id];
  }
  throw std::out_of_range("VortexSet: vortex id out of range");
}

VortexSet VortexSet::sign_swapped() const {
  VortexSet out;
  out.positive_ = negative_;
  out.negative_ = positive_;
  out.recount();
  return out;
}

void VortexSet::validate(double L1, double L2) const {
  std::vector<Point2> pts;
  for (const auto* list : {&positive_, &negative_}) {
    for (const auto& v : *list) {
      if (!(v.p.x >= 0.0 && v.p.x < L1 && v.p.y >= 0.0 && v.p.y < L2)) {
        std::ostringstream os;
        os << "vortex (" << v.p.x << ", " << v.p.y << ") outside the fundamental domain";
        throw GeometryError(os.str());
      }
      pts.push_back(v.p);
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (pts[i].x == pts[j].x && pts[i].y == pts[j].y) {
        throw GeometryError("vortex points must be pairwise distinct");
      }
    }
  }
}

void VortexSet::recount() {
  n1_ = 0;
  n2_ = 0;
  for (const auto& v : positive_) n1_ += v.multiplicity;
  for (const auto& v : negative_) n2_ += v.multiplicity;
}

HypothesisReport check_hypotheses(const VortexSet& v, const ModelParams& p) {
  HypothesisReport r;
  r.h1_holds = v.N1() != v.N2();
  auto all_simple = [](const std::vector<Vortex>& list) {
    return std::all_of(list.begin(), list.end(), [](const Vortex& x) { return x.multiplicity <= 1; });
  };
  if (p.tau() == 1.0) {
    r.h2_holds = true;
  } else if (v.N1() > v.N2()) {
    r.h2_holds = all_simple(v.positive());
  } else if (v.N2() > v.N1()) {
    r.h2_holds = all_simple(v.negative());
  } else {
    r.h2_holds = true;
  }
  std::ostringstream os;
  os << "N1=" << v.N1() << " N2=" << v.N2() << " tau=" << p.tau() << "; (H1) "
     << (r.h1_holds ? "holds" : "fails") << ", (H2) " << (r.h2_holds ? "holds" : "fails");
  r.detail = os.str();
  return r;
}

}  // namespace o3v
