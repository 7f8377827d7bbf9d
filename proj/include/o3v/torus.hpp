#pragma once

#include <optional>
#include <string>
#include <vector>

#include "o3v/core_math.hpp"
#include "o3v/errors.hpp"
#include "o3v/green.hpp"
#include "o3v/grid.hpp"

namespace o3v {

/// A vortex after snapping to the grid.
struct VortexNode {
  std::size_t id = 0;  ///< VortexSet flat id (positives first)
  int sign = +1;
  int multiplicity = 1;
  Point2 p;            ///< snapped position
  int i = 0;
  int j = 0;
  std::size_t k = 0;   ///< flat grid index
  /// Coefficient of G(., p) in u0: -4 pi m for positive, +4 pi m for negative.
  double weight() const;
};

/// Singular background u0 = -4 pi sum m_{j,1} G(., p_{j,1}) + 4 pi sum m_{j,2} G(., p_{j,2}).
/// u0 is -inf / +inf on positive / negative vortex nodes.
struct Background {
  Grid u0;
  VortexSet snapped;
  std::vector<VortexNode> nodes;
  std::vector<std::string> warnings;
  double gamma = 0.0;  ///< regular part of G at the source
};

/// Snaps every vortex to its nearest node (warning per moved point) and
/// samples u0. Two vortices on one node raise GeometryError.
Background make_background(const TorusDomain& domain, const VortexSet& vortices);
Grid build_u0(const TorusDomain& domain, const VortexSet& vortices);

/// Solution u = u0 + v of  Delta u + eps^{-2} f(u) = 4 pi sum m1 delta - 4 pi sum m2 delta.
struct TorusField {
  TorusDomain domain{1.0, 1.0, 32, 32};
  VortexSet vortices;
  ModelParams params{1.0, 1.0};
  Grid u0;
  Grid v;
  std::vector<VortexNode> nodes;
  double gamma = 0.0;
  std::vector<double> newton_history;  ///< max-norm residuals, final stage
  double residual_norm = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
  std::string method;
  std::vector<double> schedule;        ///< epsilons visited
  std::vector<std::string> warnings;

  double u(std::size_t k) const { return u0[k] + v[k]; }
  /// 4 pi (N1 - N2) / |Omega|, the constant in the residual.
  double mean_source() const;
};

enum class Density { F, DF, F1, F2, Quantization };

/// Density at every node, with kernel limits on vortex nodes. Not scaled by eps.
Grid density_grid(const TorusField& field, Density d);

/// F(v) = Delta v + eps^{-2} f(u0 + v) - 4 pi (N1 - N2) / |Omega|.
Grid residual(const TorusField& field);

/// int eps^{-2} f(u) dx (trapezoid).
double total_mass(const TorusField& field);
/// int |eps^{-2} f(u)| dx.
double mass_bound_report(const TorusField& field);

struct NewtonOptions {
  double tol_factor = 1e-10;  ///< converged when |F|_inf < tol_factor * eps^{-2} * scale
  double scale = 1.0;
  int max_iterations = 60;
  double linear_rtol = 1e-11;
  int max_linear = 2000;
  int max_growth = 5;
};

/// Thrown when Newton fails; carries the last iterate.
class NewtonFailure : public NonConvergence {
 public:
  NewtonFailure(const std::string& what, double best, Grid last)
      : NonConvergence(what, best), last_(std::move(last)) {}
  const Grid& last_iterate() const noexcept { return last_; }

 private:
  Grid last_;
};

/// Geometric schedule eps0, eps0*ratio, ... ending exactly at target.
std::vector<double> continuation_schedule(double target, double eps0 = 0.25, double ratio = 0.8);

/// Damped Newton. With a non-empty `continuation` the problem is solved at
/// each listed epsilon in turn (warm-started) and the field for the last one
/// is returned; otherwise it is solved at params.epsilon().
TorusField solve_newton(const TorusDomain& domain, const VortexSet& vortices, const ModelParams& params,
                        const Grid* v_init = nullptr, const std::vector<double>& continuation = {},
                        const NewtonOptions& opts = {});

struct MonotoneOptions {
  double tol_factor = 1e-12;
  int max_iterations = 20000;
  /// Allowed upward step before the ordering counts as violated.
  double ordering_slack = 1e-9;
};

struct SignCheck {
  std::size_t violations = 0;
  double worst = 0.0;
};

struct MonotoneReport {
  double shift = 0.0;
  SignCheck sub_check;    ///< nodes where F(sub) < 0
  SignCheck super_check;  ///< nodes where F(super) > 0
};

/// Monotone iteration (-Delta + K) v_{n+1} = eps^{-2} f(u0 + v_n) - c + K v_n
/// from the supersolution, K = eps^{-2} sup|f'|. Throws MonotonicityFailure
/// if an iterate rises above its predecessor or drops below `sub`.
TorusField solve_monotone(const TorusDomain& domain, const VortexSet& vortices, const ModelParams& params,
                          const Grid& sub, const Grid& super, const MonotoneOptions& opts = {},
                          MonotoneReport* report = nullptr);

/// Supersolution candidate for positive vortices: v = 4 pi sum m G_sigma,
/// G_sigma the Gaussian-smoothed Green's function (width sigma).
Grid smoothed_supersolution(const TorusDomain& domain, const VortexSet& vortices, double sigma);

SignCheck residual_sign_check(const TorusField& probe, int expected_sign);

struct IdentityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_err = 0.0;
};

/// int (a+1)|grad u|^2 e^u/(a+e^u)^2 + eps^{-2} e^u (1-e^u)^2/((tau+e^u)^3 (a+e^u)) dx
/// against 4 pi (N1/a + N2).
IdentityResult identity_check(const TorusField& field, double a);

/// Smooth part s(p) in u = +/- 2 m ln|x - p| + s near a vortex node.
double smooth_part_at_vortex(const TorusField& field, const VortexNode& node);

/// Gradient of u0 at every node (zero on vortex nodes).
void background_gradient(const TorusField& field, Grid& gx, Grid& gy);

}  // namespace o3v
