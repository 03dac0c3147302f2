#include "cfear/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cfear/errors.hpp"

namespace cfear {

namespace {

struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
};

inline double cross2(const Vec2& p, const Vec2& q) { return p.x() * q.y() - p.y() * q.x(); }

inline uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double value_noise(const Vec2& p, double scale, uint64_t salt) {
  const double gx = p.x() / scale, gy = p.y() / scale;
  const auto ix = static_cast<int64_t>(std::floor(gx));
  const auto iy = static_cast<int64_t>(std::floor(gy));
  auto lattice = [salt](int64_t x, int64_t y) {
    const uint64_t h = mix64(static_cast<uint64_t>(x) * 0x9e3779b97f4a7c15ull ^
                             static_cast<uint64_t>(y) * 0xc2b2ae3d27d4eb4full ^ salt);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
  };
  auto smooth = [](double t) { return t * t * (3.0 - 2.0 * t); };
  const double fx = smooth(gx - static_cast<double>(ix));
  const double fy = smooth(gy - static_cast<double>(iy));
  const double v0 = lattice(ix, iy) * (1.0 - fx) + lattice(ix + 1, iy) * fx;
  const double v1 = lattice(ix, iy + 1) * (1.0 - fx) + lattice(ix + 1, iy + 1) * fx;
  return v0 * (1.0 - fy) + v1 * fy;
}

// World-anchored reflectivity texture for extended surfaces. Real radar
// returns from walls are strongly non-uniform, and the threshold filter keeps
// only the persistent peaks; a uniform wall would make grid centroids
// sensor-relative and the surface untrackable along its own direction. High
// contrast on purpose: weak sections drop below typical z_min values.
double surface_texture(const Vec2& p) {
  const double v = 0.6 * value_noise(p, 1.2, 0x7e07ull) + 0.4 * value_noise(p, 5.0, 0x30c7ull);
  return 0.05 + 0.95 * v * v;
}

}  // namespace

Bounds World::bounds() const {
  Bounds b;
  bool first = true;
  auto extend = [&](const Vec2& p) {
    if (first) {
      b.lo = b.hi = p;
      first = false;
    } else {
      b.lo = b.lo.cwiseMin(p);
      b.hi = b.hi.cwiseMax(p);
    }
  };
  for (const WallSegment& s : segments) {
    extend(s.a);
    extend(s.b);
  }
  for (const PointReflector& r : reflectors) extend(r.position);
  return b;
}

World load_world(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  World world;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (tag == "seg") {
      WallSegment s;
      if (!(ss >> s.a.x() >> s.a.y() >> s.b.x() >> s.b.y() >> s.reflectivity))
        throw ParseError(where + ": expected 'seg x1 y1 x2 y2 refl'");
      world.segments.push_back(s);
    } else if (tag == "pt") {
      PointReflector r;
      if (!(ss >> r.position.x() >> r.position.y() >> r.reflectivity))
        throw ParseError(where + ": expected 'pt x y refl'");
      world.reflectors.push_back(r);
    } else {
      throw ParseError(where + ": unknown tag '" + tag + "'");
    }
    const double refl = tag == "seg" ? world.segments.back().reflectivity
                                     : world.reflectors.back().reflectivity;
    if (!(refl > 0.0 && refl <= 1.0)) throw ParseError(where + ": reflectivity outside (0, 1]");
  }
  if (world.empty()) throw ParseError(path.string() + ": world has no landmarks");
  return world;
}

namespace {
void append_num(std::string& out, double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, p);
}
}  // namespace

void save_world(const std::filesystem::path& path, const World& world) {
  std::string out;
  for (const WallSegment& s : world.segments) {
    out += "seg ";
    append_num(out, s.a.x());
    out += ' ';
    append_num(out, s.a.y());
    out += ' ';
    append_num(out, s.b.x());
    out += ' ';
    append_num(out, s.b.y());
    out += ' ';
    append_num(out, s.reflectivity);
    out += '\n';
  }
  for (const PointReflector& r : world.reflectors) {
    out += "pt ";
    append_num(out, r.position.x());
    out += ' ';
    append_num(out, r.position.y());
    out += ' ';
    append_num(out, r.reflectivity);
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError(path.string() + ": cannot open for writing");
  f << out;
}

PolarScan simulate_sweep(const World& world, const PoseFunction& trajectory, double t0,
                         const SimConfig& cfg, uint64_t scan_id) {
  PolarScan scan;
  scan.num_azimuths = cfg.num_azimuths;
  scan.num_range_bins = cfg.num_range_bins;
  scan.range_resolution = cfg.range_resolution;
  scan.range_offset = cfg.range_offset;
  scan.scan_id = scan_id;
  scan.azimuth_angles.resize(cfg.num_azimuths);
  scan.azimuth_times.resize(cfg.num_azimuths);
  scan.intensities.assign(static_cast<size_t>(cfg.num_azimuths) * cfg.num_range_bins, 0.0f);

  SplitMix64 rng(cfg.rng_seed * 0x9e3779b97f4a7c15ull + scan_id + 1);

  // Transient clutter for this sweep only.
  std::vector<PointReflector> clutter;
  if (cfg.clutter_fraction > 0.0 && !world.empty()) {
    const size_t base = std::max(world.reflectors.size(), world.segments.size());
    const auto n = static_cast<size_t>(std::llround(cfg.clutter_fraction * base));
    const Bounds bb = world.bounds();
    clutter.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      clutter.push_back({Vec2(rng.uniform(bb.lo.x(), bb.hi.x()), rng.uniform(bb.lo.y(), bb.hi.y())),
                         rng.uniform(0.5, 1.0)});
    }
  }

  const double max_range =
      cfg.range_offset + cfg.num_range_bins * cfg.range_resolution;
  const double sigma = kRangeResponseSigmaBins;
  const double az_sigma = 0.5 * cfg.beam_width;

  auto deposit = [&](float* row, double amplitude, double r) {
    if (r < 1e-3 || r > max_range + 5.0 * sigma * cfg.range_resolution) return;
    const double peak = amplitude * std::min(1.0, kFalloffReferenceRange / r);
    if (peak < 1e-4) return;
    const double bc = (r - cfg.range_offset) / cfg.range_resolution - 0.5;
    const int lo = std::max(0, static_cast<int>(std::ceil(bc - 3.0 * sigma)));
    const int hi = std::min(cfg.num_range_bins - 1, static_cast<int>(std::floor(bc + 3.0 * sigma)));
    for (int b = lo; b <= hi; ++b) {
      const double d = (b - bc) / sigma;
      row[b] += static_cast<float>(peak * std::exp(-0.5 * d * d));
    }
  };

  for (int i = 0; i < cfg.num_azimuths; ++i) {
    const double azimuth = 2.0 * M_PI * i / cfg.num_azimuths;
    const double t = t0 + cfg.sweep_duration * i / cfg.num_azimuths;
    scan.azimuth_angles[i] = azimuth;
    scan.azimuth_times[i] = t;
    const Pose2 pose = trajectory(t);
    const Vec2 origin = pose.translation();
    const double heading = pose.theta + azimuth;
    const Vec2 dir(std::cos(heading), std::sin(heading));
    float* row = scan.intensities.data() + static_cast<size_t>(i) * cfg.num_range_bins;

    for (const WallSegment& s : world.segments) {
      const Vec2 v = s.b - s.a;
      const double denom = cross2(dir, v);
      if (std::abs(denom) < 1e-12) continue;
      const Vec2 w = s.a - origin;
      const double r = cross2(w, v) / denom;
      const double u = cross2(w, dir) / denom;
      if (r <= 0.0 || u < 0.0 || u > 1.0) continue;
      deposit(row, s.reflectivity * surface_texture(origin + r * dir), r);
    }

    auto shoot_point = [&](const PointReflector& p) {
      const Vec2 rel = p.position - origin;
      const double r = rel.norm();
      if (r < 1e-6) return;
      const double bearing = std::atan2(rel.y(), rel.x());
      const double da = wrap_angle(bearing - heading);
      if (std::abs(da) > 3.0 * az_sigma) return;
      const double gain = std::exp(-0.5 * (da / az_sigma) * (da / az_sigma));
      deposit(row, p.reflectivity * gain, r);
    };
    for (const PointReflector& p : world.reflectors) shoot_point(p);
    for (const PointReflector& p : clutter) shoot_point(p);

    if (cfg.noise_floor > 0.0) {
      for (int b = 0; b < cfg.num_range_bins; ++b)
        row[b] += static_cast<float>(std::abs(rng.normal()) * cfg.noise_floor);
    }
    for (int b = 0; b < cfg.num_range_bins; ++b) row[b] = std::min(row[b], 1.0f);
  }
  scan.validate();
  return scan;
}

void PiecewisePath::add_twist(double duration, const Twist2& twist) {
  pieces_.push_back({total_, duration, end_, twist});
  end_ = end_ * se2_exp(twist * duration);
  total_ += duration;
}

void PiecewisePath::add_straight(double length, double speed) {
  add_twist(length / speed, Twist2{speed, 0.0, 0.0});
}

void PiecewisePath::add_arc(double radius, double angle, double speed) {
  const double arc_len = std::abs(radius * angle);
  const double duration = arc_len / speed;
  const double omega = angle / duration;
  add_twist(duration, Twist2{speed, 0.0, omega});
}

void PiecewisePath::add_ramp(double to_speed, double duration, int steps) {
  for (int k = 0; k < steps; ++k) {
    const double v = to_speed * (k + 1) / steps;
    add_twist(duration / steps, Twist2{v, 0.0, 0.0});
  }
}

double PiecewisePath::arc_length() const {
  double len = 0.0;
  for (const Piece& p : pieces_) len += std::hypot(p.twist.vx, p.twist.vy) * p.duration;
  return len;
}

Pose2 PiecewisePath::pose_at(double t) const {
  if (pieces_.empty()) return end_;
  if (t <= 0.0) return pieces_.front().start;
  if (t >= total_) return end_;
  // Few pieces; linear scan is fine.
  for (const Piece& p : pieces_) {
    if (t < p.t0 + p.duration || &p == &pieces_.back()) {
      return p.start * se2_exp(p.twist * (t - p.t0));
    }
  }
  return end_;
}

SyntheticSequence generate_sequence(const World& world, const PiecewisePath& path,
                                    const SimConfig& cfg, double frame_rate, int max_frames) {
  SyntheticSequence seq;
  const PoseFunction fn = [&path](double t) { return path.pose_at(t); };
  const double frame_dt = 1.0 / frame_rate;
  int frames = static_cast<int>(
      std::floor((path.duration() - cfg.sweep_duration) / frame_dt + 1e-9)) + 1;
  if (path.duration() <= 0.0) frames = std::max(frames, 1);
  if (max_frames >= 0) frames = std::min(frames, max_frames);
  seq.scans.reserve(frames);
  seq.ground_truth.reserve(frames);
  for (int f = 0; f < frames; ++f) {
    const double t0 = f * frame_dt;
    PolarScan scan = simulate_sweep(world, fn, t0, cfg, static_cast<uint64_t>(f));
    const double t_ref = scan.azimuth_times[scan.num_azimuths / 2];
    seq.ground_truth.push_back({t_ref, path.pose_at(t_ref)});
    seq.scans.push_back(std::move(scan));
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Scenario library
// ---------------------------------------------------------------------------

namespace {

std::vector<Vec2> path_samples(const PiecewisePath& path, double step_s = 0.2) {
  std::vector<Vec2> out;
  for (double t = 0.0; t <= path.duration(); t += step_s)
    out.push_back(path.pose_at(t).translation());
  out.push_back(path.end_pose().translation());
  return out;
}

double clearance(const Vec2& p, const std::vector<Vec2>& samples) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& s : samples) best = std::min(best, (p - s).norm());
  return best;
}

Bounds inflated_path_bounds(const std::vector<Vec2>& samples, double margin) {
  Bounds b;
  b.lo = b.hi = samples.front();
  for (const Vec2& s : samples) {
    b.lo = b.lo.cwiseMin(s);
    b.hi = b.hi.cwiseMax(s);
  }
  b.lo -= Vec2(margin, margin);
  b.hi += Vec2(margin, margin);
  return b;
}

void add_rect(World& w, const Vec2& center, double width, double height, double refl) {
  const Vec2 h(0.5 * width, 0.5 * height);
  const Vec2 c0 = center + Vec2(-h.x(), -h.y());
  const Vec2 c1 = center + Vec2(h.x(), -h.y());
  const Vec2 c2 = center + Vec2(h.x(), h.y());
  const Vec2 c3 = center + Vec2(-h.x(), h.y());
  w.segments.push_back({c0, c1, refl});
  w.segments.push_back({c1, c2, refl});
  w.segments.push_back({c2, c3, refl});
  w.segments.push_back({c3, c0, refl});
}

World make_blocks_world(const PiecewisePath& path, uint64_t seed, double block_spacing = 40.0) {
  SplitMix64 rng(seed ^ 0xb10c5ull);
  World w;
  const auto samples = path_samples(path);
  const Bounds bb = inflated_path_bounds(samples, 60.0);
  for (double gx = bb.lo.x(); gx <= bb.hi.x(); gx += block_spacing) {
    for (double gy = bb.lo.y(); gy <= bb.hi.y(); gy += block_spacing) {
      const Vec2 center(gx + rng.uniform(-10.0, 10.0), gy + rng.uniform(-10.0, 10.0));
      const double width = rng.uniform(8.0, 22.0);
      const double height = rng.uniform(8.0, 22.0);
      const double radius = 0.5 * std::hypot(width, height);
      if (clearance(center, samples) < radius + 8.0) continue;
      add_rect(w, center, width, height, rng.uniform(0.65, 0.95));
    }
  }
  for (double gx = bb.lo.x(); gx <= bb.hi.x(); gx += 25.0) {
    for (double gy = bb.lo.y(); gy <= bb.hi.y(); gy += 25.0) {
      const Vec2 p(gx + rng.uniform(-8.0, 8.0), gy + rng.uniform(-8.0, 8.0));
      if (clearance(p, samples) < 6.0) continue;
      if (rng.uniform() < 0.6) w.reflectors.push_back({p, rng.uniform(0.5, 0.9)});
    }
  }
  return w;
}

World make_forest_world(const PiecewisePath& path, uint64_t seed) {
  SplitMix64 rng(seed ^ 0xf03e57ull);
  World w;
  const auto samples = path_samples(path);
  const Bounds bb = inflated_path_bounds(samples, 50.0);
  const double area = (bb.hi.x() - bb.lo.x()) * (bb.hi.y() - bb.lo.y());
  const auto count = static_cast<int>(area / 64.0);
  for (int i = 0; i < count; ++i) {
    const Vec2 p(rng.uniform(bb.lo.x(), bb.hi.x()), rng.uniform(bb.lo.y(), bb.hi.y()));
    if (clearance(p, samples) < 5.0) continue;
    w.reflectors.push_back({p, rng.uniform(0.4, 1.0)});
  }
  // A few rock faces for orientation structure.
  for (int i = 0; i < 8; ++i) {
    const Vec2 p(rng.uniform(bb.lo.x(), bb.hi.x()), rng.uniform(bb.lo.y(), bb.hi.y()));
    if (clearance(p, samples) < 12.0) continue;
    const double ang = rng.uniform(0.0, M_PI);
    const Vec2 d(std::cos(ang), std::sin(ang));
    const double len = rng.uniform(10.0, 30.0);
    w.segments.push_back({p - 0.5 * len * d, p + 0.5 * len * d, rng.uniform(0.6, 0.9)});
  }
  return w;
}

World make_canyon_world(const PiecewisePath& path, uint64_t seed) {
  SplitMix64 rng(seed ^ 0xca4704ull);
  World w;
  const auto samples = path_samples(path);
  const double step = 10.0;  // wall panel length along the path
  std::vector<Vec2> centers;
  for (double t = 0.0;; t += step / 10.0) {  // 10 m of arc at nominal 10 m/s
    centers.push_back(path.pose_at(std::min(t, path.duration())).translation());
    if (t >= path.duration()) break;
  }
  for (int side = -1; side <= 1; side += 2) {
    double offset = rng.uniform(12.0, 16.0);
    for (size_t i = 0; i + 1 < centers.size(); ++i) {
      const Vec2 tangent_raw = centers[i + 1] - centers[i];
      if (tangent_raw.norm() < 1e-6) continue;
      const Vec2 tangent = tangent_raw.normalized();
      const Vec2 normal(-tangent.y(), tangent.x());
      const double next_offset =
          std::clamp(offset + rng.uniform(-2.0, 2.0), 11.0, 18.0);
      if (rng.uniform() > 0.12) {
        const Vec2 a = centers[i] + side * offset * normal;
        const Vec2 b = centers[i + 1] + side * next_offset * normal;
        w.segments.push_back({a, b, rng.uniform(0.6, 0.95)});
      }
      offset = next_offset;
    }
  }
  // Poles between the walls give along-track constraints.
  for (size_t i = 0; i < centers.size(); i += 2) {
    if (rng.uniform() < 0.4) continue;
    const Vec2 jitter(rng.uniform(-9.0, 9.0), rng.uniform(-9.0, 9.0));
    const Vec2 p = centers[i] + jitter;
    if (clearance(p, samples) < 4.0) continue;
    w.reflectors.push_back({p, rng.uniform(0.5, 0.9)});
  }
  return w;
}

// Ramp-up arc length for add_ramp(to_speed, duration) with the default steps.
double ramp_distance(double to_speed, double duration) {
  return to_speed * duration * 9.0 / 16.0;
}

PiecewisePath make_mixed_path(double target_length, double speed) {
  PiecewisePath path;
  const struct {
    bool arc;
    double a, b;  // straight: length; arc: radius, angle
  } plan[] = {
      {false, 120.0, 0.0}, {true, 40.0, M_PI / 2}, {false, 100.0, 0.0},
      {true, 30.0, -2.0 * M_PI / 3}, {false, 150.0, 0.0}, {true, 50.0, M_PI / 3},
      {false, 120.0, 0.0}, {true, 35.0, -M_PI / 2}, {false, 150.0, 0.0},
  };
  const double ramp_len = ramp_distance(speed, 2.0);
  path.add_ramp(speed, 2.0);
  double remaining = target_length - ramp_len;
  bool first_straight = true;
  for (const auto& step : plan) {
    if (remaining <= 0.0) break;
    if (step.arc) {
      const double len = std::abs(step.a * step.b);
      if (len > remaining) break;
      path.add_arc(step.a, step.b, speed);
      remaining -= len;
    } else {
      double len = std::min(step.a, remaining);
      if (first_straight) {
        len = std::max(1.0, len - ramp_len);
        first_straight = false;
      }
      path.add_straight(len, speed);
      remaining -= len;
    }
  }
  if (remaining > 1.0) path.add_straight(remaining, speed);
  return path;
}

}  // namespace

std::vector<std::string> scenario_names() {
  return {"mixed800-blocks", "mixed800-forest", "mixed800-canyon", "mixed300-blocks",
          "mixed300-forest", "mixed300-canyon", "loop400", "turn90", "throughput"};
}

Scenario make_scenario(const std::string& name, uint64_t seed) {
  Scenario sc;
  sc.name = name;
  sc.sim.rng_seed = seed;
  if (name == "mixed800-blocks" || name == "mixed800-forest" || name == "mixed800-canyon") {
    sc.path = make_mixed_path(800.0, 10.0);
  } else if (name == "mixed300-blocks" || name == "mixed300-forest" ||
             name == "mixed300-canyon") {
    sc.path = make_mixed_path(300.0, 10.0);
  } else if (name == "loop400") {
    sc.path = PiecewisePath{};
    sc.path.add_ramp(8.0, 2.0);
    sc.path.add_straight(80.0 - ramp_distance(8.0, 2.0), 8.0);
    sc.path.add_arc(15.0, M_PI / 2, 8.0);
    for (int i = 0; i < 3; ++i) {
      sc.path.add_straight(80.0, 8.0);
      sc.path.add_arc(15.0, M_PI / 2, 8.0);
    }
  } else if (name == "turn90") {
    sc.path = PiecewisePath{};
    sc.path.add_ramp(7.2, 2.0);
    sc.path.add_straight(30.0 - ramp_distance(7.2, 2.0), 7.2);
    sc.path.add_arc(16.0, M_PI / 2, 7.2);  // 0.45 rad/s, ~6.4 deg of heading per frame
    sc.path.add_straight(30.0, 7.2);
    sc.sim.num_range_bins = 600;
  } else if (name == "throughput") {
    sc.path = PiecewisePath{};
    sc.path.add_ramp(10.0, 2.0);
    sc.path.add_straight(120.0 - ramp_distance(10.0, 2.0), 10.0);
    sc.path.add_arc(60.0, M_PI / 4, 10.0);
    sc.path.add_straight(90.0, 10.0);
    sc.sim.num_range_bins = 3000;
    sc.sim.range_resolution = 0.1;
  } else {
    throw UnknownScenario("unknown scenario '" + name + "'");
  }

  if (name.ends_with("-forest")) {
    sc.world = make_forest_world(sc.path, seed);
  } else if (name.ends_with("-canyon")) {
    sc.world = make_canyon_world(sc.path, seed);
  } else if (name == "turn90") {
    sc.world = make_blocks_world(sc.path, seed, 30.0);
  } else if (name == "throughput") {
    sc.world = make_canyon_world(sc.path, seed);
  } else {
    sc.world = make_blocks_world(sc.path, seed);
  }
  if (sc.world.empty()) throw UnknownScenario("scenario '" + name + "' produced an empty world");
  return sc;
}

}  // namespace cfear
