#pragma once

#include <vector>

#include "cfear/filtering.hpp"
#include "cfear/geometry.hpp"

namespace cfear {

/// Oriented surface point: intensity-weighted centroid, regularized sample
/// covariance and the surface normal (eigenvector of the smallest eigenvalue,
/// oriented toward the sensor origin).
struct SurfacePoint {
  Vec2 mean = Vec2::Zero();
  Mat2 covariance = Mat2::Identity();
  Vec2 normal = Vec2::UnitY();
  int support = 0;
  double intensity_sum = 0.0;
};

/// Sparse set of oriented surface points, one per occupied grid cell, in the
/// sensor frame described by frame_pose.
struct SurfacePointSet {
  std::vector<SurfacePoint> points;
  Pose2 frame_pose;
  double resolution = 0.0;

  bool empty() const { return points.empty(); }
  size_t size() const { return points.size(); }
};

struct FeatureConfig {
  double resolution = 3.0;  // grid cell side, meters
  int n_min = 6;            // minimum returns per cell
};

// Covariance eigenvalue floor: max(kCovAbsFloor, kCovRelFloor * lambda_max).
constexpr double kCovAbsFloor = 1e-6;  // m^2
constexpr double kCovRelFloor = 1e-4;

/// Re-expresses every point in the sensor frame at t_ref under a constant
/// body twist: p' = exp((t - t_ref) * twist) * p. Intensities and azimuth
/// indices are unchanged.
std::vector<FilteredPoint> motion_compensate(const std::vector<FilteredPoint>& points,
                                             const Twist2& twist, double t_ref);

/// Grid-cell aggregation into oriented surface points. Cells with fewer than
/// n_min contributors are dropped (the sparsification step). Output is sorted
/// by cell index and therefore deterministic.
SurfacePointSet compute_surface_points(const std::vector<FilteredPoint>& points,
                                       double resolution, int n_min);

inline SurfacePointSet compute_surface_points(const std::vector<FilteredPoint>& points,
                                              const FeatureConfig& cfg) {
  return compute_surface_points(points, cfg.resolution, cfg.n_min);
}

}  // namespace cfear
