#include "cfear/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "cfear/errors.hpp"

namespace cfear {

std::string DriftReport::pair_string() const {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "(%.2f/%.2f)", translation_error_percent,
                rotation_error_deg_per_100m);
  return buf;
}

namespace {

// Nearest estimate index for each ground-truth timestamp, within tolerance.
struct Matched {
  std::vector<Pose2> est;
  std::vector<Pose2> gt;
  int dropped = 0;
};

Matched associate(const Trajectory& estimate, const Trajectory& ground_truth) {
  Matched m;
  m.est.reserve(ground_truth.size());
  m.gt.reserve(ground_truth.size());
  for (const TrajectoryPoint& g : ground_truth) {
    auto it = std::lower_bound(estimate.begin(), estimate.end(), g.t,
                               [](const TrajectoryPoint& p, double t) { return p.t < t; });
    double best_dt = std::numeric_limits<double>::infinity();
    const TrajectoryPoint* best = nullptr;
    if (it != estimate.end() && std::abs(it->t - g.t) < best_dt) {
      best_dt = std::abs(it->t - g.t);
      best = &*it;
    }
    if (it != estimate.begin()) {
      const auto prev = std::prev(it);
      if (std::abs(prev->t - g.t) < best_dt) {
        best_dt = std::abs(prev->t - g.t);
        best = &*prev;
      }
    }
    if (best && best_dt <= kTimeAssocTolerance) {
      m.est.push_back(best->pose);
      m.gt.push_back(g.pose);
    } else {
      ++m.dropped;
    }
  }
  return m;
}

}  // namespace

DriftReport evaluate_drift(const Trajectory& estimate, const Trajectory& ground_truth) {
  if (estimate.empty() || ground_truth.empty())
    throw TooShort("empty trajectory");
  const Matched m = associate(estimate, ground_truth);
  const int n = static_cast<int>(m.gt.size());
  if (n == 0) throw NoTimeOverlap("no pose pairs associate within the time tolerance");

  // Cumulative arc length along the matched ground-truth path.
  std::vector<double> arc(n, 0.0);
  for (int i = 1; i < n; ++i)
    arc[i] = arc[i - 1] + (m.gt[i].translation() - m.gt[i - 1].translation()).norm();

  constexpr int kNumLengths = static_cast<int>(std::size(kDriftLengths));
  if (arc.back() < kDriftLengths[0])
    throw TooShort("associated ground truth shorter than the 100 m minimum segment");

  struct Acc {
    double t_sum = 0.0, r_sum = 0.0;
    int count = 0;
  };
  Acc total;
  Acc per_len[kNumLengths];

  // One advancing end cursor per length; every frame is a candidate start.
  int cursor[kNumLengths] = {};
  for (int s = 0; s < n; ++s) {
    for (int li = 0; li < kNumLengths; ++li) {
      const double want = kDriftLengths[li];
      int& e = cursor[li];
      if (e < s) e = s;
      while (e < n && arc[e] - arc[s] < want) ++e;
      if (e >= n) break;  // longer segments will not fit either
      const double seg_len = arc[e] - arc[s];
      const Pose2 gt_rel = m.gt[s].inverse() * m.gt[e];
      const Pose2 est_rel = m.est[s].inverse() * m.est[e];
      const Pose2 err = gt_rel.inverse() * est_rel;
      const double t_err = err.translation().norm() / seg_len;
      const double r_err = std::abs(err.theta) / seg_len;  // rad per meter
      total.t_sum += t_err;
      total.r_sum += r_err;
      ++total.count;
      per_len[li].t_sum += t_err;
      per_len[li].r_sum += r_err;
      ++per_len[li].count;
    }
  }
  if (total.count == 0)
    throw TooShort("no full 100 m segment in the associated ground truth");

  DriftReport report;
  report.dropped_matches = m.dropped;
  report.segment_count = total.count;
  report.translation_error_percent = 100.0 * total.t_sum / total.count;
  report.rotation_error_deg_per_100m = (180.0 / M_PI) * 100.0 * total.r_sum / total.count;
  for (int li = 0; li < kNumLengths; ++li) {
    if (per_len[li].count == 0) continue;
    DriftReport::PerLength pl;
    pl.length_m = kDriftLengths[li];
    pl.segments = per_len[li].count;
    pl.translation_error_percent = 100.0 * per_len[li].t_sum / per_len[li].count;
    pl.rotation_error_deg_per_100m = (180.0 / M_PI) * 100.0 * per_len[li].r_sum / per_len[li].count;
    report.per_length.push_back(pl);
  }
  return report;
}

namespace {

void append_num(std::string& out, double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, p);
}

double parse_num(std::string_view tok, const std::string& where) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError(where + ": bad number '" + std::string(tok) + "'");
  return v;
}

}  // namespace

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  Trajectory traj;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    std::string_view sv = line;
    double vals[4];
    for (int i = 0; i < 4; ++i) {
      while (!sv.empty() && sv.front() == ' ') sv.remove_prefix(1);
      const size_t sp = sv.find(' ');
      const std::string_view tok = sv.substr(0, sp);
      if (tok.empty()) throw ParseError(where + ": expected 'timestamp x y theta'");
      vals[i] = parse_num(tok, where);
      sv = (sp == std::string_view::npos) ? std::string_view{} : sv.substr(sp + 1);
    }
    if (!traj.empty() && vals[0] <= traj.back().t)
      throw ParseError(where + ": timestamps must be strictly increasing");
    traj.push_back({vals[0], Pose2{vals[1], vals[2], vals[3]}});
  }
  return traj;
}

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  std::string out;
  out.reserve(traj.size() * 80);
  for (const TrajectoryPoint& p : traj) {
    append_num(out, p.t);
    out += ' ';
    append_num(out, p.pose.x);
    out += ' ';
    append_num(out, p.pose.y);
    out += ' ';
    append_num(out, p.pose.theta);
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError(path.string() + ": cannot open for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw ParseError(path.string() + ": write failed");
}

void write_trajectory_kitti(const std::filesystem::path& path, const Trajectory& traj) {
  std::string out;
  out.reserve(traj.size() * 160);
  for (const TrajectoryPoint& p : traj) {
    const double c = std::cos(p.pose.theta), s = std::sin(p.pose.theta);
    const double row[12] = {c, -s, 0, p.pose.x, s, c, 0, p.pose.y, 0, 0, 1, 0};
    for (int i = 0; i < 12; ++i) {
      if (i) out += ' ';
      append_num(out, row[i]);
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError(path.string() + ": cannot open for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw ParseError(path.string() + ": write failed");
}

}  // namespace cfear
