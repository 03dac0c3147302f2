#include "cfear/odometry.hpp"

#include <chrono>

#include "cfear/errors.hpp"

namespace cfear {

Pose2 constant_velocity_prior(const Pose2& prev, const Pose2& prev_prev, double dt_prev,
                              double dt_now) {
  if (!(dt_prev > 0.0)) return prev;
  const Twist2 xi = se2_log(prev_prev.inverse() * prev);
  return prev * se2_exp(Twist2{xi.vx / dt_prev, xi.vy / dt_prev, xi.omega / dt_prev} * dt_now);
}

OdometryConfig preset(std::string_view name) {
  OdometryConfig cfg;
  cfg.preset_name = std::string(name);
  cfg.reg.radius_coarse = 2.0 * cfg.features.resolution;
  cfg.reg.radius_fine = cfg.features.resolution;
  if (name == "cfear-3") {
    cfg.reg.ctf_enabled = false;
    cfg.keyframe_capacity = 4;
  } else if (name == "cfear-ctf") {
    cfg.reg.ctf_enabled = true;
    cfg.keyframe_capacity = 4;
  } else if (name == "cfear-ctf-s10") {
    cfg.reg.ctf_enabled = true;
    cfg.keyframe_capacity = 10;
  } else {
    throw UnknownPreset("unknown preset '" + std::string(name) +
                        "' (expected cfear-3|cfear-ctf|cfear-ctf-s10)");
  }
  return cfg;
}

OdometryPipeline::OdometryPipeline(OdometryConfig cfg)
    : cfg_(std::move(cfg)), keyframes_(cfg_.keyframe_capacity) {}

OdometryUpdate OdometryPipeline::process_scan(const PolarScan& scan) {
  using clock = std::chrono::steady_clock;
  const auto seconds_since = [](clock::time_point t0) {
    return std::chrono::duration<double>(clock::now() - t0).count();
  };
  scan.validate();

  OdometryUpdate update;
  update.scan_id = scan.scan_id;
  update.t_ref = scan.azimuth_times[scan.num_azimuths / 2];

  auto t0 = clock::now();
  std::vector<FilteredPoint> filtered = k_strongest(scan, cfg_.filter);
  update.timing.filter_s = seconds_since(t0);
  update.filtered_points = static_cast<int>(filtered.size());

  t0 = clock::now();
  Twist2 twist;
  if (scan_count_ >= 1 && last_dt_ > 0.0) {
    const Twist2 xi = se2_log(last_relative_);
    twist = {xi.vx / last_dt_, xi.vy / last_dt_, xi.omega / last_dt_};
  }
  filtered = motion_compensate(filtered, twist, update.t_ref);
  SurfacePointSet surf = compute_surface_points(filtered, cfg_.features);
  update.timing.features_s = seconds_since(t0);
  update.surface_points = static_cast<int>(surf.size());

  t0 = clock::now();
  Pose2 pose;
  if (scan_count_ == 0) {
    pose = Pose2{};
  } else {
    const double dt_now = update.t_ref - t_prev_;
    const Pose2 prior = (scan_count_ == 1)
                            ? prev_
                            : constant_velocity_prior(prev_, prev_prev_, last_dt_, dt_now);
    std::vector<RegistrationTarget> targets;
    targets.reserve(keyframes_.size());
    for (const Keyframe& kf : keyframes_.entries())
      targets.push_back({&kf.set, &kf.grid, kf.pose});
    try {
      SolveResult result = solve(cfg_.reg, targets, surf, prior);
      pose = result.pose;
      update.report = result.report;
      update.fallback = result.report.degenerate;
    } catch (const DegenerateRegistration&) {
      pose = prior;
      update.fallback = true;
      update.report.degenerate = true;
    }
  }
  update.timing.register_s = seconds_since(t0);
  update.pose = pose;

  const bool first = (scan_count_ == 0);
  const bool far_enough =
      !first && !keyframes_.empty() &&
      (pose.translation() - keyframes_.newest().pose.translation()).norm() >=
          cfg_.keyframe_distance;
  if (first || far_enough) {
    surf.frame_pose = pose;
    HashGrid grid = build_hash_grid(surf, cfg_.reg.max_radius());
    keyframes_.push(Keyframe{pose, std::move(surf), std::move(grid), scan.scan_id});
    update.new_keyframe = true;
  }

  if (scan_count_ >= 1) {
    last_relative_ = prev_.inverse() * pose;
    last_dt_ = update.t_ref - t_prev_;
  }
  prev_prev_ = prev_;
  prev_ = pose;
  t_prev_ = update.t_ref;
  ++scan_count_;
  return update;
}

}  // namespace cfear
