#pragma once

#include <deque>
#include <string>
#include <string_view>

#include "cfear/features.hpp"
#include "cfear/filtering.hpp"
#include "cfear/hash_grid.hpp"
#include "cfear/polar_scan.hpp"
#include "cfear/registration.hpp"

namespace cfear {

/// Constant-velocity extrapolation: the relative twist between the two
/// previous poses, scaled to dt_now and composed onto the latest pose.
Pose2 constant_velocity_prior(const Pose2& prev, const Pose2& prev_prev, double dt_prev,
                              double dt_now);

struct Keyframe {
  Pose2 pose;  // world frame
  SurfacePointSet set;
  HashGrid grid;
  uint64_t scan_id = 0;
};

/// Fixed-capacity queue of keyframes, newest first; eviction is oldest-first.
class KeyframeQueue {
 public:
  explicit KeyframeQueue(int capacity) : capacity_(capacity) {}

  void push(Keyframe kf) {
    entries_.push_front(std::move(kf));
    while (static_cast<int>(entries_.size()) > capacity_) entries_.pop_back();
  }
  int capacity() const { return capacity_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Keyframe& newest() const { return entries_.front(); }
  const std::deque<Keyframe>& entries() const { return entries_; }

 private:
  int capacity_;
  std::deque<Keyframe> entries_;
};

struct OdometryConfig {
  std::string preset_name = "cfear-3";
  FilterConfig filter;
  FeatureConfig features;
  RegistrationConfig reg;
  double keyframe_distance = 1.5;  // meters of translation before a new keyframe
  int keyframe_capacity = 4;
};

/// Named configurations. All parameters are identical across presets except
/// the coarse-to-fine flag and the keyframe capacity.
///   cfear-3       point-to-distribution, Huber only, 4 keyframes
///   cfear-ctf     cfear-3 plus the coarse-to-fine schedule
///   cfear-ctf-s10 cfear-ctf with 10 keyframes
OdometryConfig preset(std::string_view name);  // throws UnknownPreset

struct StageTiming {
  double filter_s = 0.0;
  double features_s = 0.0;
  double register_s = 0.0;
  double total_s() const { return filter_s + features_s + register_s; }
};

struct OdometryUpdate {
  Pose2 pose;  // world frame at the scan's reference time
  uint64_t scan_id = 0;
  double t_ref = 0.0;  // timestamp of the middle azimuth
  SolveReport report;
  bool fallback = false;  // degenerate registration, pose is the prior
  bool new_keyframe = false;
  StageTiming timing;
  int filtered_points = 0;
  int surface_points = 0;
};

/// The per-scan pipeline: k-strongest filter, motion compensation with the
/// twist of the previous solved relative pose, surface-point extraction, and
/// scan-to-multikeyframe registration seeded by the constant-velocity prior.
/// Holds only past data; single-threaded state mutation.
class OdometryPipeline {
 public:
  explicit OdometryPipeline(OdometryConfig cfg);

  OdometryUpdate process_scan(const PolarScan& scan);

  const OdometryConfig& config() const { return cfg_; }
  const KeyframeQueue& keyframes() const { return keyframes_; }
  int scans_processed() const { return scan_count_; }

 private:
  OdometryConfig cfg_;
  KeyframeQueue keyframes_;
  int scan_count_ = 0;
  Pose2 prev_;
  Pose2 prev_prev_;
  double t_prev_ = 0.0;
  Pose2 last_relative_;  // prev_prev_^-1 * prev_, the solved relative motion
  double last_dt_ = 0.0;
};

}  // namespace cfear
