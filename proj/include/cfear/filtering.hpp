#pragma once

#include <vector>

#include "cfear/geometry.hpp"
#include "cfear/polar_scan.hpp"

namespace cfear {

/// A surviving radar return in sensor-frame Cartesian coordinates at its
/// azimuth's acquisition time.
struct FilteredPoint {
  Vec2 position = Vec2::Zero();
  double intensity = 0.0;  // normalized, > z_min
  double time = 0.0;       // seconds, timestamp of the source azimuth
  int azimuth_index = 0;   // source row in the polar matrix
};

/// Stage-one conservative filter: keep at most k returns per azimuth, each
/// strictly above z_min and at range >= r_min.
struct FilterConfig {
  int k = 12;
  double z_min = 60.0 / 255.0;
  double r_min = 2.5;  // meters; blanks near-field clutter
};

/// Center of range bin `bin` along direction `azimuth`.
inline Vec2 polar_to_cartesian(double azimuth, int bin, const RangeMeta& meta) {
  const double r = meta.range_offset + (bin + 0.5) * meta.range_resolution;
  return {r * std::cos(azimuth), r * std::sin(azimuth)};
}

/// Top-k strongest returns per azimuth above the intensity threshold.
/// Output is azimuth-major, then descending intensity, ties by ascending bin.
std::vector<FilteredPoint> k_strongest(const PolarScan& scan, const FilterConfig& cfg);

}  // namespace cfear
