#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "cfear/evaluation.hpp"
#include "cfear/geometry.hpp"
#include "cfear/polar_scan.hpp"

namespace cfear {

struct PointReflector {
  Vec2 position = Vec2::Zero();
  double reflectivity = 1.0;  // in (0, 1]
};

struct WallSegment {
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
  double reflectivity = 1.0;
};

struct Bounds {
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Zero();
};

/// A 2D landmark world: line segments (walls) and point reflectors (poles).
struct World {
  std::vector<WallSegment> segments;
  std::vector<PointReflector> reflectors;

  bool empty() const { return segments.empty() && reflectors.empty(); }
  Bounds bounds() const;
};

/// Text format: one line per landmark, `seg x1 y1 x2 y2 refl` or `pt x y refl`.
World load_world(const std::filesystem::path& path);
void save_world(const std::filesystem::path& path, const World& world);

struct SimConfig {
  int num_azimuths = 400;
  int num_range_bins = 800;
  double range_resolution = 0.25;  // meters per bin
  double range_offset = 0.0;
  double sweep_duration = 0.25;            // seconds per rotation
  double noise_floor = 0.02;               // intensity std of the additive floor
  double beam_width = 2.0 * M_PI / 180.0;  // radians, angular spread of point returns
  uint64_t rng_seed = 0;
  double clutter_fraction = 0.0;  // transient false reflectors per sweep,
                                  // relative to the world's landmark count
};

// Gaussian range response width (bins) and the 1/r falloff reference range.
constexpr double kRangeResponseSigmaBins = 1.5;
constexpr double kFalloffReferenceRange = 100.0;  // meters

using PoseFunction = std::function<Pose2(double)>;

/// Simulates one sweep starting at t0. Each azimuth fires at its own
/// timestamp from the pose at that instant, which reproduces motion
/// distortion. All intersections along a ray deposit a Gaussian-shaped
/// response (no occlusion model). Deterministic given cfg.rng_seed and
/// scan_id.
PolarScan simulate_sweep(const World& world, const PoseFunction& trajectory, double t0,
                         const SimConfig& cfg, uint64_t scan_id);

/// Piecewise-constant-twist trajectory built from straights and arcs.
class PiecewisePath {
 public:
  explicit PiecewisePath(const Pose2& start = Pose2{}) : end_(start) {}

  void add_twist(double duration, const Twist2& twist);
  void add_straight(double length, double speed);
  /// Positive angle turns left. Arc length = |radius * angle|.
  void add_arc(double radius, double angle, double speed);
  /// Straight-line acceleration approximated by stepped constant-twist
  /// pieces; keeps the per-frame velocity change small enough for a
  /// constant-velocity prior to track.
  void add_ramp(double to_speed, double duration, int steps = 8);

  double duration() const { return total_; }
  double arc_length() const;
  Pose2 pose_at(double t) const;  // clamped to [0, duration]
  Pose2 end_pose() const { return end_; }

 private:
  struct Piece {
    double t0;
    double duration;
    Pose2 start;
    Twist2 twist;
  };
  std::vector<Piece> pieces_;
  Pose2 end_;
  double total_ = 0.0;
};

struct SyntheticSequence {
  std::vector<PolarScan> scans;
  Trajectory ground_truth;  // sampled at each scan's middle-azimuth timestamp
};

/// Scans at frame_rate along the path, each with per-azimuth distortion.
/// max_frames < 0 fits as many sweeps as the path duration allows.
SyntheticSequence generate_sequence(const World& world, const PiecewisePath& path,
                                    const SimConfig& cfg, double frame_rate,
                                    int max_frames = -1);

/// A named, seeded test scenario: world + trajectory + sensor config.
struct Scenario {
  std::string name;
  World world;
  PiecewisePath path;
  SimConfig sim;
  double frame_rate = 4.0;
};

Scenario make_scenario(const std::string& name, uint64_t seed);  // throws UnknownScenario
std::vector<std::string> scenario_names();

}  // namespace cfear
