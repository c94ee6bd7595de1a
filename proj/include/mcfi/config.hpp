#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcfi/burgers.hpp"
#include "mcfi/objectives.hpp"
#include "mcfi/optimize.hpp"
#include "mcfi/scenarios.hpp"

namespace mcfi {

/// Flat `key = value` map. Blank lines and lines starting with '#' are
/// ignored; a repeated key is an error.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);

/// FNV-1a over the canonical "key=value\n" listing, as 16 hex digits.
std::string config_hash(const KeyValues& values);

enum class Scenario { Burgers1D, Burgers2D };

enum class TargetSource {
  /// One forward run at `target.design`.
  Design,
  /// One forward run at a named strip profile (2D only).
  Profile,
  /// target_mode_i.csv, target_sigma.csv and target_mean.csv from `target.dir`.
  Files,
};

enum class InitialState { Default, Zero };

struct RunConfig {
  Scenario scenario = Scenario::Burgers1D;
  /// Nodes per direction; ny is ignored in 1D.
  int nx = 161;
  int ny = 161;
  SolverConfig solver = SolverConfig::burgers1d();
  GaussianBumps1D bumps;
  Strips2D strips;
  double lower = -0.35;
  double upper = 0.35;
  InitialState initial_state = InitialState::Default;

  DesignVector initial_design;
  ObjectiveKind objective = ObjectiveKind::QuadraticMode;
  int mode_count = 1;
  double lambda = 1.0;

  TargetSource target_source = TargetSource::Design;
  DesignVector target_design;
  StripProfile target_profile = StripProfile::MultiPeak;
  std::filesystem::path target_dir;
  /// Modes written by make-target; 0 means what the objective reads.
  int target_modes = 0;

  double fd_step = 1e-6;
  /// Zero-based components; empty checks all (or `fd_sample` random ones).
  std::vector<int> fd_components;
  int fd_sample = 0;
  /// Largest accepted relative error; infinite disables the check.
  double threshold = std::numeric_limits<double>::infinity();

  OptimizeOptions optimize;
  std::vector<double> output_times;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";

  /// Hash of the effective key-value listing (command-line overrides
  /// included, output location excluded).
  std::string hash;

  Grid grid() const;
  DesignSpec design() const;
  StateVector initial_condition() const;
  int design_size() const;
};

/// Builds a run configuration from parsed keys. Relative paths resolve
/// against `base_dir`. Unknown keys are rejected.
RunConfig make_run_config(const KeyValues& values, const std::filesystem::path& base_dir = {});

RunConfig load_run_config(const std::filesystem::path& path, const KeyValues& overrides = {});

std::string to_string(Scenario scenario);

}  // namespace mcfi
