#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "cfear/odometry.hpp"

namespace cfear {

/// Applies a `key=value` override to a config. Mirrors every tuning knob:
///   filter.k filter.z_min filter.r_min
///   features.resolution features.n_min
///   reg.metric reg.huber_delta reg.cauchy_scale reg.ctf_enabled
///   reg.max_outer reg.radius_coarse reg.radius_fine
///   odom.keyframe_distance odom.keyframe_capacity
/// Throws ParseError for unknown keys or unparseable values.
void apply_override(OdometryConfig& cfg, const std::string& key, const std::string& value);

/// Splits "key=value" and applies it.
void apply_override(OdometryConfig& cfg, const std::string& key_value);

/// Reads a flat key=value file (used for sidecar metadata and config files).
/// Blank lines and lines starting with '#' are ignored.
std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

}  // namespace cfear
