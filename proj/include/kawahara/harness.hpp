#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kawahara/spectral_core.hpp"

namespace kawahara::harness {

inline constexpr const char* tool_name = "kawahara_lab";
inline constexpr const char* tool_version = "0.3.0";

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_invariant = 3;

/// Schema violation; `path` is the dotted location of the offending field.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

private:
  std::string path_;
};

struct ExperimentConfig {
  std::string name;
  nlohmann::json params;  // fully resolved: defaults merged with the user document
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
};

const std::vector<std::string>& experiment_names();

/// Default parameter block for an experiment; every accepted key appears here.
nlohmann::json default_params(const std::string& name);

/// Sets a leaf by dotted path, e.g. "params.K=32" or "seed=7". Paths that do
/// not start with a top-level key (experiment, seed, out_dir, params) are
/// taken relative to params. The value is parsed as JSON, falling back to a
/// plain string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Validates a config document and resolves defaults.
ExperimentConfig resolve_config(const std::string& name, const nlohmann::json& doc);

struct RunResult {
  int exit_code = exit_ok;
  std::string message;
  nlohmann::json summary;
};

/// Runs one experiment, writing manifest.json first and the artifacts after.
/// Exceptions are mapped to exit codes: config problems to 2, invariant
/// violations to 3.
RunResult run(const ExperimentConfig& config);

/// Initial data described by a JSON block:
///   {"kind": "zero"}
///   {"kind": "cosines", "amplitudes": [a_1, a_2, ...]}     u = sum a_j cos(j x / lambda)
///   {"kind": "random", "modes": M, "amplitude": A, "decay": d}
/// Random data draw c_n = A <n>^-d (g1 + i g2) / sqrt(2) from the counter
/// generator keyed by (seed, stream), with counters 4n .. 4n + 3 for mode n
/// so that the low modes do not depend on M or K.
SpectralField make_data(const nlohmann::json& data, const TorusSpec& spec, std::uint64_t seed,
                        std::uint64_t stream = 0, const std::string& path = "params.data");

}  // namespace kawahara::harness
