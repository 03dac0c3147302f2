#pragma once

#include <cstdint>
#include <vector>

#include "cfear/errors.hpp"

namespace cfear {

/// Range metadata of a polar sweep. Bin b covers the interval around
/// range_offset + (b + 0.5) * range_resolution (bin-center convention).
struct RangeMeta {
  double range_resolution = 1.0;  // meters per range bin
  double range_offset = 0.0;      // meters to the center of bin 0
};

/// One 360 degree sweep: the intensity matrix Z (num_azimuths x num_range_bins)
/// with per-azimuth firing angles and timestamps. Intensities are normalized
/// to [0, 1]. Immutable after construction/validation.
struct PolarScan {
  int num_azimuths = 0;
  int num_range_bins = 0;
  std::vector<float> intensities;      // row-major, one row per azimuth
  std::vector<double> azimuth_angles;  // radians, strictly increasing in [0, 2pi)
  std::vector<double> azimuth_times;   // seconds, non-decreasing
  double range_resolution = 1.0;
  double range_offset = 0.0;
  uint64_t scan_id = 0;

  float at(int azimuth, int bin) const {
    return intensities[static_cast<size_t>(azimuth) * num_range_bins + bin];
  }
  float& at(int azimuth, int bin) {
    return intensities[static_cast<size_t>(azimuth) * num_range_bins + bin];
  }

  RangeMeta meta() const { return {range_resolution, range_offset}; }

  /// Throws EmptyScan / InvalidScan / NonMonotoneTimestamps when an
  /// invariant is violated.
  void validate() const;

  /// Maximum sweep span in seconds accepted by validate().
  static constexpr double kMaxSweepSeconds = 0.5;
};

}  // namespace cfear
