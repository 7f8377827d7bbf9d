#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "o3v/core_math.hpp"

namespace o3v {

enum class BoundaryType { Topological, NonTopologicalI, NonTopologicalII, Undetermined };

std::string to_string(BoundaryType b);

/// Sign of the point source at the origin for nu > 0.
///   NegativeVortex:  Delta u + f(u) = -4 pi nu delta_0,  u ~ -2 nu ln r.
///   PositiveVortex:  Delta u + f(u) = +4 pi nu delta_0,  u ~ +2 nu ln r.
enum class SourceOrientation { NegativeVortex, PositiveVortex };

struct RadialOptions {
  SourceOrientation orientation = SourceOrientation::NegativeVortex;
  Nonlinearity nonlinearity = Nonlinearity::SigmaO3;
  double r0 = 1e-6;
  int samples_per_decade = 200;
  /// Undetermined tails are re-run with r_max multiplied by 100 this many times.
  int max_retries = 2;
};

struct RadialSample {
  double r;
  double u;
  double du;  ///< du/dr
};

struct RadialDiagnostics {
  long steps = 0;
  long rejected = 0;
  double r_end = 0.0;
  bool stopped_early = false;
  int retries = 0;
  double beta_raw = 0.0;  ///< -r v' at the last sample, before extrapolation
  // find_topological only
  int bisection_iterations = 0;
  double bracket_width = 0.0;
  double truncation_radius = 0.0;
  double truncation_u = 0.0;
};

/// Radial profile sampled on the uniform grid t_k = ln r0 + k dt.
/// u = v - 2 c ln r with c = nu (NegativeVortex) or c = -nu (PositiveVortex).
struct RadialSolution {
  double s = 0.0;
  double nu = 0.0;
  double tau = 1.0;
  SourceOrientation orientation = SourceOrientation::NegativeVortex;
  Nonlinearity nonlinearity = Nonlinearity::SigmaO3;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<RadialSample> grid;
  std::vector<double> v;   ///< regular part
  std::vector<double> rv;  ///< r v'
  double beta = 0.0;
  BoundaryType bc_type = BoundaryType::Undetermined;
  RadialDiagnostics diagnostics;
  std::vector<std::string> warnings;

  /// c in u = v - 2 c ln r.
  double log_coefficient() const noexcept {
    return orientation == SourceOrientation::NegativeVortex ? nu : -nu;
  }
  Kernel kernel() const { return Kernel(tau, nonlinearity); }
};

RadialSolution integrate_radial(double s, double nu, double tau, double r_max = 1e6, double tol = 1e-10,
                                const RadialOptions& opts = {});

struct BetaSample {
  double s = 0.0;
  double beta = 0.0;
  BoundaryType bc_type = BoundaryType::Undetermined;
  bool failed = false;
  std::string error;
};

struct BetaCurve {
  double tau = 1.0;
  std::vector<BetaSample> samples;
  int monotone_violations = 0;
};

/// One integrate_radial per s (OpenMP across samples; results keyed by
/// position). Pairs straddling s = 0 are not compared for monotonicity.
BetaCurve compute_beta_curve(double tau, const std::vector<double>& s_values, double r_max = 1e6,
                             double tol = 1e-10, const RadialOptions& opts = {});

/// Adjacent pairs with beta decreasing by more than `noise`.
int count_monotone_violations(const std::vector<BetaSample>& samples, double noise = 1e-6);

struct TopologicalOptions {
  RadialOptions radial;
  double r_max = 1e6;
  double tol = 1e-10;
  /// Tails are classified by integrating out to this radius.
  double r_search = 1e3;
  double width_tol = 1e-13;
  int max_iterations = 200;
  /// |u| at the truncation radius below this counts as topological.
  double topological_tolerance = 1e-6;
  double scan_min = -10.0;
  double scan_max = 10.0;
  int scan_points = 81;
};

/// Bisection on the regular-part initial value for the solution that decays
/// to 0. Without a bracket, one is located by scanning [scan_min, scan_max].
RadialSolution find_topological(double nu, double tau,
                                std::optional<std::pair<double, double>> bracket = std::nullopt,
                                const TopologicalOptions& opts = {});

/// Sign (+1 / -1) of the diverging tail, 0 if the profile is identically zero.
int tail_sign(double s, double nu, double tau, const TopologicalOptions& opts);

enum class MassKind { Flux, F1Mass, F2Mass, Quantization };

std::string to_string(MassKind k);

/// 2 pi int_0^{r_max} kernel(u(r)) r dr by composite Simpson in t = ln r.
/// `warning` is set when the profile is Undetermined.
double mass_integral(const RadialSolution& sol, MassKind kind, bool* warning = nullptr);

/// Same integral up to sample index `last`, using every `stride`-th sample.
double radial_integral(const RadialSolution& sol, double (*density)(const Kernel&, double), std::size_t last,
                       int stride = 1);

/// Largest deviation of r v'(r) + int_0^r f(u) rho d rho over the samples
/// (the exact first integral of the radial equation).
double flux_identity_error(const RadialSolution& sol);

/// Profile at radius r by cubic Hermite interpolation in t = ln r. Below r0
/// the regular part is frozen at its first sample.
RadialSample sample_at(const RadialSolution& sol, double r);

/// Least-squares slope of u against ln r over the last decade.
double tail_slope(const RadialSolution& sol);

}  // namespace o3v
