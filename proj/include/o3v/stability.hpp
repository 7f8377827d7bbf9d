#pragma once

#include <optional>
#include <string>
#include <vector>

#include "o3v/errors.hpp"
#include "o3v/radial.hpp"
#include "o3v/torus.hpp"

namespace o3v {

struct EigenResult {
  double eigenvalue = 0.0;
  /// Grid values (row-major) for the torus problem, samples on the t-grid for
  /// the radial one. L2-normalized; sign chosen so the sum is positive.
  std::vector<double> eigenvector;
  double rayleigh = 0.0;
  double residual_norm = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
  /// Principal eigenvector does not change sign.
  bool positive = false;
  /// Radial only: |mu(R) - mu(R/2)| / |mu(R)|, and whether it is below 5%.
  std::optional<double> sensitivity;
  bool reliable = true;
  std::vector<std::string> warnings;
};

struct TorusEigenOptions {
  /// Stop when |A x - mu x| / |x| < tol * max(1, |mu|).
  double tol = 1e-10;
  int max_iterations = 2000;
  /// Iterations without improving the best residual before giving up.
  int stall_limit = 200;
};

/// Smallest eigenvalue of -Delta - eps^{-2} f'(u) on the periodic grid
/// (LOBPCG, block size one, preconditioned by (-Delta + sigma)^{-1}).
EigenResult principal_eigen_torus(const TorusField& field, const TorusEigenOptions& opts = {});

/// Applies -Delta - eps^{-2} f'(u) to `in`.
void apply_linearized(const TorusField& field, const Grid& in, Grid& out);

struct RadialEigenOptions {
  /// Truncation radius; defaults to the last sample of the profile.
  std::optional<double> r_max;
  double bisection_tol = 1e-13;
  int inverse_iterations = 6;
  double sensitivity_limit = 0.05;
};

/// Smallest mu with (-Delta - f'(u)) psi = mu (1 - e^u) psi on the disc of
/// radius r_max, psi = 0 at r_max. Throws WeightIndefinite if 1 - e^u < 0 at
/// any sample inside the disc.
EigenResult weighted_eigen_radial(const RadialSolution& sol, const RadialEigenOptions& opts = {});

enum class Stability { StrictlyStable, Marginal, Unstable };

std::string to_string(Stability s);

Stability classify_stability(const EigenResult& result, double margin);
/// Default torus margin 1e-8 eps^{-2}.
double default_margin(double epsilon);

std::vector<Stability> classify_batch(const std::vector<EigenResult>& results, double margin);

}  // namespace o3v
