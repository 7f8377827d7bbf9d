#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "o3v/asymptotics.hpp"
#include "o3v/radial.hpp"
#include "o3v/stability.hpp"
#include "o3v/torus.hpp"

namespace o3v {

struct ShooterSettings {
  double tau = 1.0;
  double s = 0.0;
  double nu = 0.0;
  SourceOrientation orientation = SourceOrientation::NegativeVortex;
  bool find_topological = false;
  double r_max = 1e6;
  double tol = 1e-10;
  double s_min = -8.0;
  double s_max = -0.25;
  int n = 16;
};

struct SweepSettings {
  double epsilon_max = 0.25;
  double epsilon_min = 0.05;
  int steps = 8;
  std::vector<double> epsilons;  ///< overrides the geometric schedule when non-empty
  double K_radius = 1.25;
  double ball_radius = 1.25;
  bool eigen = true;
};

struct StabilitySettings {
  enum class Target { Torus, Radial } target = Target::Torus;
  std::optional<double> margin;
  double s = -1.0;
  double nu = 0.0;
  double tau = 1.0;
  SourceOrientation orientation = SourceOrientation::NegativeVortex;
  double r_max = 1e6;
  double tol = 1e-10;
};

struct VerifySettings {
  std::optional<std::filesystem::path> field;
  std::vector<double> a_values{0.5, 1.0, 2.0};
  double ball_radius = 1.0;
  double residual_factor = 10.0;  ///< residual must stay below this times the solver tolerance
  double mass_tol = 1e-6;
  double identity_tol = 1e-3;
  double pohozaev_tol = 1e-3;
  double quantization_tol = 0.05;
};

struct OutputSettings {
  std::filesystem::path dir = ".";
  std::string prefix = "o3v";
  bool export_field = false;
  std::optional<int> slice_row;
};

/// Parsed and validated experiment description.
struct ExperimentConfig {
  TorusDomain domain{6.283185307179586, 6.283185307179586, 256, 256};
  VortexSet vortices;
  double tau = 1.0;
  Nonlinearity nonlinearity = Nonlinearity::SigmaO3;
  std::optional<double> epsilon;
  std::vector<double> epsilon_schedule;
  std::string solver = "newton";
  NewtonOptions newton;
  MonotoneOptions monotone;
  TorusEigenOptions eigen;
  double eps0 = 0.25;
  double ratio = 0.8;
  bool continuation = true;
  double monotone_sub = -50.0;
  std::optional<double> monotone_super_sigma;  ///< default eps / 2
  ShooterSettings shooter;
  SweepSettings sweep;
  StabilitySettings stability;
  VerifySettings verify;
  OutputSettings output;
  std::uint64_t seed = 0;

  /// Target epsilon of a single torus solve.
  double target_epsilon() const;
  /// Epsilons visited by a single torus solve (continuation included).
  std::vector<double> solve_schedule() const;
  std::vector<double> sweep_epsilons() const;
  SweepConfig sweep_config() const;
};

/// Throws ConfigError carrying the JSON pointer of the offending value.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");

nlohmann::json load_json(const std::filesystem::path& path);

/// `key=value`, key a dotted path (`sweep.steps`, `vortices.0.x`) or a JSON
/// pointer (`/sweep/steps`). The value is parsed as JSON and kept as a string
/// when that fails.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// Solves the configured torus problem with the configured solver.
TorusField solve_configured(const ExperimentConfig& cfg, MonotoneReport* report = nullptr);

}  // namespace o3v
