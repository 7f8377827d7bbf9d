#pragma once

#include <optional>
#include <string>
#include <vector>

#include "o3v/radial.hpp"
#include "o3v/stability.hpp"
#include "o3v/torus.hpp"

namespace o3v {

struct PohozaevValue {
  double volume = 0.0;    ///< int 2 F2(u) / eps^2 over the ball
  double boundary = 0.0;  ///< circle integral of the dilation flux
  double residual = 0.0;  ///< |volume - boundary| / max(1, |boundary|)
};

/// Area fraction of each grid cell inside the periodic ball B_r(p).
Grid ball_coverage(const TorusDomain& domain, Point2 p, double r);

/// int_{B_r(p)} eps^{-2} f(u) dx for the vortex with flat id `id`.
double vortex_mass(const TorusField& field, std::size_t id, double r);
/// int over the complement of all vortex balls of radius r.
double exterior_mass(const TorusField& field, double r);
/// int_{B_r(p)} (1 - e^u)^2 / (eps^2 (tau + e^u)^2) dx.
double quantization_value(const TorusField& field, std::size_t id, double r);
/// Both sides of the Pohozaev identity on B_r(p) for the vortex `id`.
PohozaevValue pohozaev_value(const TorusField& field, std::size_t id, double r, int n_angles = 512);
/// Same identity on a ball centred at an arbitrary point with no vortex inside.
PohozaevValue pohozaev_value_at(const TorusField& field, Point2 center, double r, int n_angles = 512);
/// Radial form on B_R (eps = 1), R = grid[last].r; volume by Simpson with
/// the given sample stride.
PohozaevValue pohozaev_value(const RadialSolution& sol, std::size_t last, int stride = 1);

/// Limit of the radial volume term as R grows, pi (beta^2 + 4 c beta) with
/// beta = -lim r v' and c the log coefficient; equals pi (b^2 - 4 nu^2) for
/// b = -lim r u'.
double pohozaev_limit(const RadialSolution& sol);

struct VortexDiagnostics {
  std::size_t id = 0;
  int sign = +1;
  int multiplicity = 1;
  double mass = 0.0;
  PohozaevValue pohozaev;
  double quantization = 0.0;
  /// -mass / (4 pi) - m
  double beta_combination = 0.0;
};

struct SweepRecord {
  double epsilon = 0.0;
  bool converged = false;
  std::string error;
  double sup_K = 0.0;
  double inf_K = 0.0;
  double total_abs_mass = 0.0;
  double total_mass = 0.0;
  double exterior_mass = 0.0;
  double residual_norm = 0.0;
  std::vector<VortexDiagnostics> per_vortex;
  std::optional<EigenResult> eigen;
  std::optional<Stability> stability;
};

struct SweepConfig {
  TorusDomain domain{6.283185307179586, 6.283185307179586, 256, 256};
  VortexSet vortices;
  double tau = 1.0;
  Nonlinearity nonlinearity = Nonlinearity::SigmaO3;
  NewtonOptions newton;
  /// Continuation start for the first epsilon.
  double eps0 = 0.25;
  double ratio = 0.8;
  /// Radius of the vortex balls for masses, Pohozaev and quantization values.
  double ball_radius = 1.25;
  bool eigen = false;
};

/// Geometric list from eps_max down to eps_min with n entries.
std::vector<double> geometric_epsilons(double eps_max, double eps_min, int n);

/// Solves at each epsilon (warm-started) and fills the records. K is the
/// complement of the balls of radius K_radius about every vortex.
std::vector<SweepRecord> run_sweep(const SweepConfig& config, const std::vector<double>& epsilons,
                                   double K_radius);

enum class Alternative { A_uniform_zero, B_sup_negative, C_inf_positive, Mixed };

std::string to_string(Alternative a);

struct DecayTest {
  bool applicable = false;
  bool passed = false;
  double C_fit = 0.0;
  std::vector<double> ratios;  ///< s_k / s_j^2 for each pair, in sweep order
  std::vector<int> pair_index;  ///< k of each pair
};

struct AlternativeVerdict {
  Alternative kind = Alternative::Mixed;
  bool sup_abs_decreasing = false;
  double final_sup_abs = 0.0;
  DecayTest decay;
  double mass_max = 0.0;
  double mass_min = 0.0;
  std::string evidence;
};

/// Squared-ratio test on s = max(|sup_K|, |inf_K|): pairs (j, k) with
/// eps_j within 15% of 2 eps_k, C_k = s_k / s_j^2, passing when the last three
/// pairs satisfy C_k <= 10 max(earlier C) (or 10 with no earlier pair).
DecayTest squared_ratio_test(const std::vector<SweepRecord>& records);

AlternativeVerdict classify_alternative(const std::vector<SweepRecord>& records);

struct RescaledProfile {
  std::vector<double> radii;     ///< y
  std::vector<double> mean;      ///< angular mean of u(center + scale y)
  std::vector<double> variance;  ///< angular variance
  double shift = 0.0;            ///< -2 ln(scale), so w = u + shift
};

/// Samples u(center + scale y) on circles |y| = radii with n_angles points.
RescaledProfile rescale_blowup(const TorusField& field, Point2 center, double scale,
                               const std::vector<double>& radii, int n_angles = 64);

/// max over the radii of |mean(y) - u_radial(y)|.
double profile_deviation(const RescaledProfile& p, const RadialSolution& sol);

}  // namespace o3v
