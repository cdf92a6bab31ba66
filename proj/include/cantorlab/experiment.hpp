#pragma once

// Declarative experiments: a JSON config in, CSV/JSON artifacts and a
// manifest out. Identical configs produce byte-identical files.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cantorlab/bigfloat.hpp"

namespace cantorlab {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kPrecisionEnvVar = "CANTORLAB_PRECISION_BITS";

enum class MeasureKind { quadratic_julia, gamma_julia, ifs };

struct MapConfig {
  std::string ratio;
  std::string offset;
};

/// Decimal or "p/q" strings, parsed at the run precision.
struct MeasureConfig {
  MeasureKind kind = MeasureKind::quadratic_julia;
  std::string c;
  std::vector<std::string> gamma;
  std::vector<MapConfig> maps;
  std::vector<std::string> weights;
  /// Gauss nodes of the base rule pushed through the IFS words.
  std::size_t base_nodes = 8;
  std::optional<std::string> anchor;
};

struct ExperimentConfig {
  MeasureConfig measure;
  std::size_t level = 14;
  std::size_t n_coeffs = 64;
  Precision precision_bits = kDefaultPrecisionBits;
  std::vector<std::string> routes;
  std::vector<std::string> diagnostics;
  std::filesystem::path output_dir = "out";
  std::vector<std::string> epsilon_grid;
  std::vector<std::size_t> windows;
  std::vector<std::size_t> tails;
  bool untrusted = false;
  std::size_t threads = 0;
  /// "full" or "none".
  std::string lanczos_reorthogonalization = "full";
  std::string crossval_tolerance = "1e-8";
  std::string chebyshev_tolerance = "1e-30";
  /// Points as [re, im] strings; default is a fixed 5-point exterior grid.
  std::vector<std::pair<std::string, std::string>> grid;
  std::size_t green_levels = 20;
  std::vector<std::size_t> lyapunov_orders;
  std::vector<std::size_t> dos_orders;
  std::size_t robin_levels = 64;
  std::vector<std::string> report_targets;
  bool emit_measure = false;
};

/// Default precision: $CANTORLAB_PRECISION_BITS if set and valid, else 256.
Precision env_default_precision();

/// Validates and normalizes a config document. Throws ConfigError naming the
/// offending field.
ExperimentConfig parse_config(const nlohmann::json& doc);

/// Canonical JSON form of a config (echoed in the manifest).
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct RunOutcome {
  int exit_code = 0;
  std::string status;
  std::string message;
  nlohmann::json manifest;
};

/// Runs every requested route and diagnostic, writes the artifacts and a
/// manifest (also on failure, listing what was written). Wall time goes to a
/// separate timing.json so the manifest itself stays reproducible.
RunOutcome run_experiment(const ExperimentConfig& cfg);

/// 0 success, 2 config, 3 numerical, 4 resource cap.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace cantorlab
