#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "cfear/errors.hpp"
#include "cfear/features.hpp"
#include "cfear/geometry.hpp"
#include "cfear/hash_grid.hpp"
#include "cfear/robust_loss.hpp"

namespace cfear {

enum class Metric { PointToPoint, PointToLine, PointToDistribution };

Metric metric_from_string(const std::string& s);  // "p2p" | "p2l" | "p2d"
std::string to_string(Metric m);

/// One association between a current-scan surface point and a keyframe point.
struct Correspondence {
  int source_index;    // into the current set
  int keyframe_index;  // which registration target
  int target_index;    // into that target's set
  double weight;       // similarity weight in [0, 1]
};

/// Scalar residual g and its gradient with respect to the (x, y, theta)
/// components of the pose argument.
struct Residual {
  double g = 0.0;
  Eigen::Vector3d jacobian = Eigen::Vector3d::Zero();
};

/// Distance between surface points after mapping `source` by `pose` into the
/// target's frame. PointToDistribution uses the symmetric combined covariance
/// target.cov + R * source.cov * R^T.
Residual residual_g(Metric metric, const SurfacePoint& target, const SurfacePoint& source,
                    const Pose2& pose);

/// Normal-alignment similarity: (0.5 * (1 + |dot|))^2; 1 for parallel,
/// 0.25 for perpendicular normals.
double similarity_weight(const Vec2& normal_a, const Vec2& normal_b);
inline double similarity_weight(const SurfacePoint& a, const SurfacePoint& b) {
  return similarity_weight(a.normal, b.normal);
}

/// A keyframe as seen by the solver: its point set in its own sensor frame,
/// the world pose of that frame, and a prebuilt lookup grid.
struct RegistrationTarget {
  const SurfacePointSet* set = nullptr;
  const HashGrid* grid = nullptr;
  Pose2 pose;
};

/// Coarse-to-fine solve schedule plus the solver knobs. With ctf_enabled the
/// first two outer iterations use a convex Huber loss at the coarse
/// association radius, later iterations a Cauchy loss at the fine radius.
/// Without it every iteration is Huber at the coarse radius.
struct RegistrationConfig {
  Metric metric = Metric::PointToDistribution;
  double huber_delta = 0.1;
  double cauchy_scale = 0.1;
  bool ctf_enabled = false;
  int max_outer = 8;
  double radius_coarse = 6.0;
  double radius_fine = 3.0;

  RobustLoss loss_for(int outer) const {
    if (ctf_enabled && outer >= 2) return RobustLoss::cauchy(cauchy_scale);
    return RobustLoss::huber(huber_delta);
  }
  double radius_for(int outer) const {
    if (ctf_enabled && outer >= 2) return radius_fine;
    return radius_coarse;
  }
  /// Largest association radius of the schedule; keyframe grids use this as
  /// cell size so the 3x3 lookup contract holds for every iteration.
  double max_radius() const { return std::max(radius_coarse, radius_fine); }
};

struct CostEval {
  double cost = 0.0;
  std::vector<Correspondence> correspondences;
};

/// Associates every current point against every keyframe (nearest within
/// `radius` in the keyframe's grid, after mapping by the pose estimate) and
/// accumulates the weighted robust cost. Empty association sets yield cost 0.
CostEval evaluate_cost(Metric metric, const RobustLoss& loss,
                       std::span<const RegistrationTarget> keyframes,
                       const SurfacePointSet& current, const Pose2& pose, double radius);

struct SolveReport {
  int outer_iterations = 0;
  int inner_iterations = 0;
  double final_cost = 0.0;
  int correspondence_count = 0;
  bool degenerate = false;
};

struct SolveResult {
  Pose2 pose;
  SolveReport report;
};

// Fewer correspondences than this, or a normal scatter whose small eigenvalue
// falls below sin^2(10 deg), flags a rank-deficient problem.
constexpr int kMinCorrespondences = 6;

/// Scan-to-multikeyframe registration: outer re-association iterations driven
/// by the schedule, inner Levenberg-Marquardt steps on fixed correspondences.
/// Terminates when the combined parameter update norm drops below 1e-4 or
/// after cfg.max_outer outer iterations. Throws DegenerateRegistration when
/// the very first association is rank-deficient; later-iteration degeneracy
/// returns the best pose so far with report.degenerate set.
SolveResult solve(const RegistrationConfig& cfg, std::span<const RegistrationTarget> keyframes,
                  const SurfacePointSet& current, const Pose2& init);

}  // namespace cfear
