#pragma once

#include <string>
#include <vector>

namespace o3v {

enum class Nonlinearity {
  SigmaO3,  ///< e^u(1-e^u)/(tau+e^u)^3
  CSH,      ///< e^u(1-e^u), Chern-Simons-Higgs comparison model
};

std::string to_string(Nonlinearity n);
Nonlinearity nonlinearity_from_string(const std::string& name);

/// Model parameters shared by all solvers. Invariant: tau > 0, epsilon > 0.
class ModelParams {
 public:
  ModelParams(double tau, double epsilon, Nonlinearity nonlinearity = Nonlinearity::SigmaO3);

  double tau() const noexcept { return tau_; }
  double epsilon() const noexcept { return epsilon_; }
  Nonlinearity nonlinearity() const noexcept { return nonlinearity_; }

  ModelParams with_epsilon(double epsilon) const { return {tau_, epsilon, nonlinearity_}; }
  ModelParams with_tau(double tau) const { return {tau, epsilon_, nonlinearity_}; }

 private:
  double tau_;
  double epsilon_;
  Nonlinearity nonlinearity_;
};

// Scalar kernels. All reject non-finite input with DomainError and are
// evaluated through bounded ratios of e^{-|u|}, so any finite u is safe.

/// f_tau(u) = e^u (1 - e^u) / (tau + e^u)^3
double f_tau(double u, double tau);
/// f'_tau(u) = e^u (tau - 2(tau+1) e^u + e^{2u}) / (tau + e^u)^4
double df_tau(double u, double tau);
/// F_{1,tau}(u) = -(1 - e^u)^2 / (2 (tau+1) (tau + e^u)^2); vanishes at u = 0.
double F1_tau(double u, double tau);
/// F_{2,tau}(u) = e^u ((1-tau) e^u + 2 tau) / (2 tau^2 (tau + e^u)^2); vanishes at -inf.
double F2_tau(double u, double tau);
/// (1 - e^u)^2 / (tau + e^u)^2, the density that quantizes at vortices.
double quantization_density(double u, double tau);

/// sup over u of |f'_tau(u)|, found by golden-section refinement of a scan.
double sup_abs_df_tau(double tau);

/// Kernel bundle dispatching on the nonlinearity selector.
///
/// Limits at u = -inf / +inf are available through `*_limit` for grid nodes
/// that sit exactly on a vortex, where the singular background is infinite.
class Kernel {
 public:
  explicit Kernel(const ModelParams& p) : tau_(p.tau()), kind_(p.nonlinearity()) {}
  Kernel(double tau, Nonlinearity kind) : tau_(tau), kind_(kind) {}

  double tau() const noexcept { return tau_; }
  Nonlinearity kind() const noexcept { return kind_; }

  double f(double u) const;
  double df(double u) const;
  /// Antiderivative vanishing at u = 0 (F1 for SigmaO3, -(1-e^u)^2/2 for CSH).
  double F1(double u) const;
  /// Antiderivative vanishing at -inf; throws UnsupportedOperation in CSH mode.
  double F2(double u) const;
  double quantization(double u) const;

  // Values at u = +/- infinity (sign > 0 means +inf).
  double f_limit(int sign) const;
  double df_limit(int sign) const;
  double F1_limit(int sign) const;
  double F2_limit(int sign) const;
  double quantization_limit(int sign) const;

  /// Linearization of f at u = 0, i.e. f'(0).
  double df_at_zero() const;
  double sup_abs_df() const;

 private:
  double tau_;
  Nonlinearity kind_;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vortex {
  Point2 p;
  int multiplicity = 1;
};

/// Signed vortex points on the torus. N1/N2 are kept in sync with the lists.
class VortexSet {
 public:
  VortexSet() = default;

  void add_positive(Point2 p, int m);
  void add_negative(Point2 p, int m);

  const std::vector<Vortex>& positive() const noexcept { return positive_; }
  const std::vector<Vortex>& negative() const noexcept { return negative_; }
  int N1() const noexcept { return n1_; }
  int N2() const noexcept { return n2_; }
  std::size_t size() const noexcept { return positive_.size() + negative_.size(); }
  bool empty() const noexcept { return size() == 0; }

  /// Vortex by flat id: positives first, then negatives. Returns sign (+1/-1).
  const Vortex& at(std::size_t id, int* sign = nullptr) const;

  /// Swap positive and negative lists.
  VortexSet sign_swapped() const;

  /// Throws GeometryError unless every point lies in [0,L1)x[0,L2) and all
  /// points are pairwise distinct.
  void validate(double L1, double L2) const;

 private:
  void recount();

  std::vector<Vortex> positive_;
  std::vector<Vortex> negative_;
  int n1_ = 0;
  int n2_ = 0;
};

struct HypothesisReport {
  bool h1_holds = false;
  bool h2_holds = false;
  std::string detail;
};

/// Reads off (H1) N1 != N2 and (H2) tau == 1 or every multiplicity on the
/// side with the larger total is at most one.
HypothesisReport check_hypotheses(const VortexSet& v, const ModelParams& p);

}  // namespace o3v
