#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "kawahara/evolution.hpp"
#include <json.hpp>

namespace kawahara::io {

/// Field on disk: CSV `n,re,im` (one row per retained index) plus a JSON
/// sidecar `{"lambda": ..., "K": ..., "beta": ...}`.
void write_field(const SpectralField& u, const std::filesystem::path& csv, const std::filesystem::path& sidecar);
SpectralField read_field(const std::filesystem::path& csv, const std::filesystem::path& sidecar, bool is_real);

nlohmann::json spec_to_json(const TorusSpec& spec);
TorusSpec spec_from_json(const nlohmann::json& j);

/// Trajectory CSV rows `t,n,re,im` and a JSON metadata document.
void write_trajectory(const Trajectory& traj, const std::filesystem::path& csv, const std::filesystem::path& meta);
nlohmann::json trajectory_metadata(const Trajectory& traj);

std::string scheme_name(Scheme scheme);
Scheme scheme_from_name(const std::string& name);

/// Shortest round-trip decimal form of a double, fixed across runs.
std::string format_double(double v);

}  // namespace kawahara::io
