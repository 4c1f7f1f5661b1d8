#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riddled/bell.hpp"

namespace riddled::cli {

/// Thrown for malformed or invalid run configs (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An angle as written in a config: either radians or an exact "k pi / m".
struct AngleSpec {
  Angle angle;
  std::string text;  // echo of the input
};
AngleSpec parse_angle(const nlohmann::json& j);

struct DuffingConfig {
  std::size_t sections = 5000;
  std::size_t burn_in = 200;
};

struct BasinGridConfig {
  GridSpec grid;  // criterion and tol index are filled from the top level
};

struct TolScanConfig {
  std::size_t x_points = 100;
  double y0 = 0.4 * kPi;
  int n_max = 20;
};

struct LyapunovConfig {
  bool enabled = true;
  double window_periods = 10.0;
  std::size_t n_windows = 2000;
  std::size_t burn_in = 200;
};

struct FractionConfig {
  std::size_t samples = 200;
  std::string sampling = "line";  // line | attractor
  std::size_t burn_in = 200;
  double y_min = 1e-4;
  double y_max = 0.3;
  std::size_t n_y = 20;
  LyapunovConfig lyapunov;
};

struct WarpConfig {
  double eta = 0.2;
};

struct EnsembleConfig {
  RhoTheta rho_theta = RhoTheta::Isotropic;
  AngleSpec phi;
  AngleSpec theta0;
  std::size_t n = 1000;
  std::size_t burn_in = 200;

  EnsembleSpec spec() const;
};

struct SpinConfig {
  EnsembleConfig ensemble;
  std::vector<AngleSpec> angles;  // apparatus orientations for the Pr+ table
  WarpConfig warp;
  GridSpec grid;
};

struct BellConfig {
  EnsembleConfig ensemble;
  std::vector<AngleSpec> angles;  // first entry must be 0
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::optional<unsigned> threads;
  std::optional<std::string> output_dir;
  SystemParams system;
  StepControl step;
  int tol_index = 1;
  CaptureCriterion capture;
  DuffingConfig duffing;
  BasinGridConfig basin_grid;
  TolScanConfig tol_scan;
  FractionConfig fraction;
  SpinConfig spin;
  BellConfig bell;

  /// Step control with tol = tol0 / tol_index.
  StepControl control() const { return step.with_tol_index(tol_index); }
  SpinContext spin_context() const;
  void validate() const;
};

/// Defaults used for every key a config leaves out.
RunConfig default_config();

/// Parses a config document. Every object rejects keys it does not know.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Fully resolved config, defaults included, as written to the manifest.
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace riddled::cli
