#include "cfear/config.hpp"

#include <charconv>
#include <fstream>

#include "cfear/errors.hpp"

namespace cfear {

namespace {

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size())
    throw ParseError("config key '" + key + "': bad number '" + value + "'");
  return v;
}

int to_int(const std::string& key, const std::string& value) {
  int v = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size())
    throw ParseError("config key '" + key + "': bad integer '" + value + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw ParseError("config key '" + key + "': bad boolean '" + value + "'");
}

}  // namespace

void apply_override(OdometryConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "filter.k") {
    cfg.filter.k = to_int(key, value);
    if (cfg.filter.k < 1) throw ParseError("filter.k must be >= 1");
  } else if (key == "filter.z_min") {
    cfg.filter.z_min = to_double(key, value);
    if (cfg.filter.z_min < 0.0 || cfg.filter.z_min >= 1.0)
      throw ParseError("filter.z_min must be in [0, 1)");
  } else if (key == "filter.r_min") {
    cfg.filter.r_min = to_double(key, value);
    if (cfg.filter.r_min < 0.0) throw ParseError("filter.r_min must be >= 0");
  } else if (key == "features.resolution") {
    cfg.features.resolution = to_double(key, value);
    if (!(cfg.features.resolution > 0.0)) throw ParseError("features.resolution must be > 0");
  } else if (key == "features.n_min") {
    cfg.features.n_min = to_int(key, value);
    if (cfg.features.n_min < 1) throw ParseError("features.n_min must be >= 1");
  } else if (key == "reg.metric") {
    cfg.reg.metric = metric_from_string(value);
  } else if (key == "reg.huber_delta") {
    cfg.reg.huber_delta = to_double(key, value);
    if (!(cfg.reg.huber_delta > 0.0)) throw ParseError("reg.huber_delta must be > 0");
  } else if (key == "reg.cauchy_scale") {
    cfg.reg.cauchy_scale = to_double(key, value);
    if (!(cfg.reg.cauchy_scale > 0.0)) throw ParseError("reg.cauchy_scale must be > 0");
  } else if (key == "reg.ctf_enabled") {
    cfg.reg.ctf_enabled = to_bool(key, value);
  } else if (key == "reg.max_outer") {
    cfg.reg.max_outer = to_int(key, value);
    if (cfg.reg.max_outer < 1) throw ParseError("reg.max_outer must be >= 1");
  } else if (key == "reg.radius_coarse") {
    cfg.reg.radius_coarse = to_double(key, value);
    if (!(cfg.reg.radius_coarse > 0.0)) throw ParseError("reg.radius_coarse must be > 0");
  } else if (key == "reg.radius_fine") {
    cfg.reg.radius_fine = to_double(key, value);
    if (!(cfg.reg.radius_fine > 0.0)) throw ParseError("reg.radius_fine must be > 0");
  } else if (key == "odom.keyframe_distance") {
    cfg.keyframe_distance = to_double(key, value);
    if (!(cfg.keyframe_distance > 0.0)) throw ParseError("odom.keyframe_distance must be > 0");
  } else if (key == "odom.keyframe_capacity") {
    cfg.keyframe_capacity = to_int(key, value);
    if (cfg.keyframe_capacity < 1) throw ParseError("odom.keyframe_capacity must be >= 1");
  } else {
    throw ParseError("unknown config key '" + key + "'");
  }
}

void apply_override(OdometryConfig& cfg, const std::string& key_value) {
  const auto eq = key_value.find('=');
  if (eq == std::string::npos)
    throw ParseError("override '" + key_value + "' is not of the form key=value");
  apply_override(cfg, key_value.substr(0, eq), key_value.substr(eq + 1));
}

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  std::map<std::string, std::string> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

}  // namespace cfear
