#include "cfear/registration.hpp"

#include <algorithm>
#include <cmath>

namespace cfear {

Metric metric_from_string(const std::string& s) {
  if (s == "p2p") return Metric::PointToPoint;
  if (s == "p2l") return Metric::PointToLine;
  if (s == "p2d") return Metric::PointToDistribution;
  throw ParseError("unknown metric '" + s + "' (expected p2p|p2l|p2d)");
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::PointToPoint: return "p2p";
    case Metric::PointToLine: return "p2l";
    case Metric::PointToDistribution: return "p2d";
  }
  return "?";
}

double similarity_weight(const Vec2& normal_a, const Vec2& normal_b) {
  const double dot = std::clamp(std::abs(normal_a.dot(normal_b)), 0.0, 1.0);
  const double h = 0.5 * (1.0 + dot);
  return h * h;
}

Residual residual_g(Metric metric, const SurfacePoint& target, const SurfacePoint& source,
                    const Pose2& pose) {
  const double c = std::cos(pose.theta), s = std::sin(pose.theta);
  Mat2 rot;
  rot << c, -s, s, c;
  Mat2 drot;  // dR/dtheta
  drot << -s, -c, c, -s;
  const Vec2 p = rot * source.mean + pose.translation();
  const Vec2 d = p - target.mean;
  const Vec2 q = drot * source.mean;  // dp/dtheta

  Residual res;
  switch (metric) {
    case Metric::PointToPoint: {
      const double g = d.norm();
      res.g = g;
      if (g > 1e-12) res.jacobian << d.x() / g, d.y() / g, d.dot(q) / g;
      break;
    }
    case Metric::PointToLine: {
      const double signed_dist = target.normal.dot(d);
      const double sign = signed_dist >= 0.0 ? 1.0 : -1.0;
      res.g = std::abs(signed_dist);
      res.jacobian << sign * target.normal.x(), sign * target.normal.y(),
          sign * target.normal.dot(q);
      break;
    }
    case Metric::PointToDistribution: {
      const Mat2 sigma = target.covariance + rot * source.covariance * rot.transpose();
      const double det = sigma(0, 0) * sigma(1, 1) - sigma(0, 1) * sigma(1, 0);
      if (!(det > 0.0))
        throw std::logic_error("singular combined covariance; regularization invariant broken");
      Mat2 inv;
      inv << sigma(1, 1), -sigma(0, 1), -sigma(1, 0), sigma(0, 0);
      inv /= det;
      const Vec2 u = inv * d;
      const double g = std::sqrt(std::max(d.dot(u), 0.0));
      res.g = g;
      if (g > 1e-12) {
        const Mat2 a = drot * source.covariance * rot.transpose();
        const Mat2 dsigma = a + a.transpose();
        const double inv2g = 1.0 / (2.0 * g);
        res.jacobian << 2.0 * u.x() * inv2g, 2.0 * u.y() * inv2g,
            (2.0 * u.dot(q) - u.dot(dsigma * u)) * inv2g;
      }
      break;
    }
  }
  return res;
}

CostEval evaluate_cost(Metric metric, const RobustLoss& loss,
                       std::span<const RegistrationTarget> keyframes,
                       const SurfacePointSet& current, const Pose2& pose, double radius) {
  CostEval ev;
  for (int k = 0; k < static_cast<int>(keyframes.size()); ++k) {
    const RegistrationTarget& kf = keyframes[k];
    if (!kf.set || kf.set->points.empty()) continue;
    const Pose2 rel = kf.pose.inverse() * pose;
    const Mat2 rel_rot = rel.rotation();
    for (int i = 0; i < static_cast<int>(current.points.size()); ++i) {
      const SurfacePoint& src = current.points[i];
      const Vec2 query = rel * src.mean;
      const auto hit = kf.grid->nearest_within(*kf.set, query, radius);
      if (!hit) continue;
      const SurfacePoint& tgt = kf.set->points[*hit];
      const double w = similarity_weight(Vec2(rel_rot * src.normal), tgt.normal);
      const Residual r = residual_g(metric, tgt, src, rel);
      ev.cost += w * loss.value(r.g);
      ev.correspondences.push_back({i, k, *hit, w});
    }
  }
  return ev;
}

namespace {

// True when every correspondence normal lies within 10 degrees of one axis
// (the dominant direction of the normal scatter): the problem then lacks
// constraints perpendicular to that axis.
bool normals_degenerate(std::span<const RegistrationTarget> keyframes,
                        const std::vector<Correspondence>& corrs) {
  Mat2 scatter = Mat2::Zero();
  for (const Correspondence& c : corrs) {
    const Vec2& n = keyframes[c.keyframe_index].set->points[c.target_index].normal;
    scatter += n * n.transpose();
  }
  const Vec2 axis = sym_eigen2(scatter).evec_max;
  static const double kCosSpread = std::cos(10.0 * M_PI / 180.0);
  for (const Correspondence& c : corrs) {
    const Vec2& n = keyframes[c.keyframe_index].set->points[c.target_index].normal;
    if (std::abs(n.dot(axis)) < kCosSpread) return false;
  }
  return true;
}

struct FixedEval {
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  double cost = 0.0;
};

// Residuals over a frozen correspondence list at the given pose. The pose
// variable is the world pose; per-keyframe chain rule maps the residual
// jacobians (taken w.r.t. the relative pose) back to it.
FixedEval eval_fixed(Metric metric, const RobustLoss& loss,
                     std::span<const RegistrationTarget> keyframes,
                     const SurfacePointSet& current, const std::vector<Correspondence>& corrs,
                     const Pose2& pose, bool with_derivatives) {
  FixedEval out;
  const int nk = static_cast<int>(keyframes.size());
  std::vector<Pose2> rel(nk);
  std::vector<Mat2> inv_rot(nk);
  for (int k = 0; k < nk; ++k) {
    const Pose2 inv = keyframes[k].pose.inverse();
    rel[k] = inv * pose;
    inv_rot[k] = inv.rotation();
  }
  for (const Correspondence& c : corrs) {
    const SurfacePoint& src = current.points[c.source_index];
    const SurfacePoint& tgt = keyframes[c.keyframe_index].set->points[c.target_index];
    const Residual r = residual_g(metric, tgt, src, rel[c.keyframe_index]);
    out.cost += c.weight * loss.value(r.g);
    if (!with_derivatives) continue;
    Eigen::Vector3d j;
    j.head<2>() = inv_rot[c.keyframe_index].transpose() * r.jacobian.head<2>();
    j(2) = r.jacobian(2);
    const double alpha = c.weight * loss.irls_weight(r.g);
    out.h.noalias() += alpha * j * j.transpose();
    out.b.noalias() += alpha * r.g * j;
  }
  return out;
}

}  // namespace

SolveResult solve(const RegistrationConfig& cfg, std::span<const RegistrationTarget> keyframes,
                  const SurfacePointSet& current, const Pose2& init) {
  if (!init.finite()) throw DegenerateRegistration("non-finite initial pose");

  Pose2 pose = init;
  SolveReport report;
  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    const RobustLoss loss = cfg.loss_for(outer);
    const double radius = cfg.radius_for(outer);
    CostEval ev = evaluate_cost(cfg.metric, loss, keyframes, current, pose, radius);
    if (static_cast<int>(ev.correspondences.size()) < kMinCorrespondences ||
        normals_degenerate(keyframes, ev.correspondences)) {
      if (outer == 0)
        throw DegenerateRegistration("registration problem is rank-deficient (" +
                                     std::to_string(ev.correspondences.size()) +
                                     " correspondences)");
      report.degenerate = true;
      break;
    }
    report.outer_iterations = outer + 1;
    report.correspondence_count = static_cast<int>(ev.correspondences.size());

    const Pose2 outer_start = pose;
    double cost = ev.cost;
    double lambda = 1e-4;
    for (int inner = 0; inner < 10; ++inner) {
      const FixedEval lin =
          eval_fixed(cfg.metric, loss, keyframes, current, ev.correspondences, pose, true);
      if (lin.b.norm() < 1e-14) break;
      Eigen::Matrix3d damped = lin.h;
      for (int i = 0; i < 3; ++i) damped(i, i) += lambda * std::max(lin.h(i, i), 1e-12);
      const Eigen::Vector3d delta = damped.ldlt().solve(-lin.b);
      ++report.inner_iterations;
      if (!delta.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Pose2 candidate{pose.x + delta(0), pose.y + delta(1), pose.theta + delta(2)};
      const double cand_cost =
          eval_fixed(cfg.metric, loss, keyframes, current, ev.correspondences, candidate, false)
              .cost;
      if (cand_cost < cost) {
        pose = candidate;
        cost = cand_cost;
        lambda = std::max(lambda / 3.0, 1e-12);
        if (delta.norm() < 1e-7) break;
      } else {
        lambda *= 10.0;
      }
    }
    report.final_cost = cost;

    const double dx = pose.x - outer_start.x;
    const double dy = pose.y - outer_start.y;
    const double dth = wrap_angle(pose.theta - outer_start.theta);
    if (std::sqrt(dx * dx + dy * dy + dth * dth) < 1e-4) break;
  }
  if (!pose.finite()) throw DegenerateRegistration("solver produced a non-finite pose");
  return {pose, report};
}

}  // namespace cfear
