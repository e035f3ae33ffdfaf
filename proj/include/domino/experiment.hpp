#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "domino/array_model.hpp"
#include "domino/cascade.hpp"

namespace domino {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { Array, Cascade, Percolation, Sweep };

std::string to_string(ExperimentKind kind);
std::string to_string(BaselinePolicy policy);

/// All quantities SI (meters, watts); thresholds stored linear.
/// Defaults are the reference simulation parameters.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Cascade;
  std::uint64_t seed = 1;
  std::string output_dir = "results";
  unsigned workers = 0;

  // model
  double alpha = 3.0;
  double lambda = 4e-4;
  double beta = 1.0;
  double d_ii = 10.0;
  double noise = 1e-8;
  double window_width = 1000.0;
  double window_height = 1000.0;

  // cascade
  double delta_update = 1.0;
  std::vector<double> deltas{0.1, 0.01, 0.001};
  double p_max = 1.0;
  std::size_t trials = 1000;
  std::size_t max_rounds = 10000;
  BaselinePolicy baseline = BaselinePolicy::Nominal;
  double baseline_cap = 1.0;
  std::size_t resample_budget = 1000;
  std::optional<double> origin_guard;  // default r(Delta) + d_ii at the smallest delta

  // array / sweep
  double a1 = 0.5;
  std::vector<double> a1_grid;  // default 0.01, 0.02, ..., 1.00
  std::size_t n_max = 10000;
  std::size_t threshold_n_max = kThresholdNMax;
  double threshold_tol = 1e-9;

  // percolation
  std::size_t delta_n_terms = 10000;
  std::size_t lattice_cells = 100;
  std::size_t lattice_trials = 200;
  std::vector<double> lattice_edge_probabilities{0.2, 0.5, 0.8};

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Validates and fills defaults. Unknown keys, out-of-range values and a
/// missing experiment kind raise ConfigError carrying the offending key path.
/// Thresholds may be given as "delta" (linear) or "delta_db", each a number
/// or a list; "p_max" accepts "inf".
ExperimentConfig parse_config(const nlohmann::json& doc);

nlohmann::json to_json(const ExperimentConfig& config);

double db_to_linear(double db);
double linear_to_db(double linear);

struct OutputFile {
  std::string path;  // relative to output_dir
  std::string sha256;
  std::size_t bytes = 0;
};

struct Manifest {
  std::string status = "ok";
  std::string error;
  std::vector<OutputFile> files;
  double wall_time_s = 0.0;
};

/// Runs the configured experiment, writes its outputs and manifest.json
/// under output_dir. Output files (everything but the manifest's timing) are
/// a pure function of the config. On failure a partial manifest is written
/// before the exception propagates.
Manifest run_experiment(const ExperimentConfig& config);

std::string sha256_hex(const std::string& bytes);

}  // namespace domino
