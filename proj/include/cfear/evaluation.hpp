#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cfear/geometry.hpp"

namespace cfear {

struct TrajectoryPoint {
  double t = 0.0;  // seconds
  Pose2 pose;      // world frame
};

using Trajectory = std::vector<TrajectoryPoint>;

/// Relative drift over 100..800 m subsequences: translation in percent of the
/// traveled distance and rotation in degrees per 100 m, averaged over every
/// evaluated segment (all starts, all lengths). Errors are measured on
/// relative poses, so the report is invariant to a rigid transform of both
/// trajectories.
struct DriftReport {
  double translation_error_percent = 0.0;
  double rotation_error_deg_per_100m = 0.0;

  struct PerLength {
    double length_m = 0.0;
    double translation_error_percent = 0.0;
    double rotation_error_deg_per_100m = 0.0;
    int segments = 0;
  };
  std::vector<PerLength> per_length;
  int segment_count = 0;
  int dropped_matches = 0;  // poses without a time partner within tolerance

  /// "(T/R)" with two decimals, e.g. "(1.00/0.00)".
  std::string pair_string() const;
};

// Segment lengths of the drift protocol and the time-association tolerance.
inline constexpr double kDriftLengths[] = {100, 200, 300, 400, 500, 600, 700, 800};
inline constexpr double kTimeAssocTolerance = 0.05;  // seconds

/// Throws TooShort when the associated ground truth covers less than the
/// shortest segment length, NoTimeOverlap when no poses associate in time.
DriftReport evaluate_drift(const Trajectory& estimate, const Trajectory& ground_truth);

/// Text format: one line per pose, `timestamp x y theta`. Lossless round-trip.
Trajectory read_trajectory(const std::filesystem::path& path);
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);

/// SE(3)-style export: 12 numbers per line, the flattened 3x4 row-major
/// transform with z = 0, for interoperability with common odometry tooling.
void write_trajectory_kitti(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace cfear
