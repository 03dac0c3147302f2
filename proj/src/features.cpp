#include "cfear/features.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace cfear {

std::vector<FilteredPoint> motion_compensate(const std::vector<FilteredPoint>& points,
                                             const Twist2& twist, double t_ref) {
  std::vector<FilteredPoint> out = points;
  if (twist.is_zero()) return out;
  for (FilteredPoint& p : out) {
    const double dt = p.time - t_ref;
    if (dt == 0.0) continue;
    p.position = se2_exp(twist * dt) * p.position;
  }
  return out;
}

namespace {

inline int64_t cell_key(int32_t cx, int32_t cy) {
  return (static_cast<int64_t>(cx) << 32) ^ static_cast<int64_t>(static_cast<uint32_t>(cy));
}

// Orients n toward the sensor origin; exact ties fall back to +y (then +x).
Vec2 disambiguate_normal(Vec2 n, const Vec2& mean) {
  const double d = n.dot(-mean);
  if (d < -1e-12) return -n;
  if (d > 1e-12) return n;
  if (n.y() < 0.0) return -n;
  if (n.y() == 0.0 && n.x() < 0.0) return -n;
  return n;
}

}  // namespace

SurfacePointSet compute_surface_points(const std::vector<FilteredPoint>& points,
                                       double resolution, int n_min) {
  SurfacePointSet set;
  set.resolution = resolution;
  if (points.empty()) return set;

  struct Cell {
    int32_t cx, cy;
    std::vector<int> members;
  };
  std::unordered_map<int64_t, Cell> cells;
  cells.reserve(points.size());
  const double inv_res = 1.0 / resolution;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    const Vec2& p = points[i].position;
    const auto cx = static_cast<int32_t>(std::floor(p.x() * inv_res));
    const auto cy = static_cast<int32_t>(std::floor(p.y() * inv_res));
    auto [it, inserted] = cells.try_emplace(cell_key(cx, cy));
    if (inserted) {
      it->second.cx = cx;
      it->second.cy = cy;
    }
    it->second.members.push_back(i);
  }

  std::vector<const Cell*> ordered;
  ordered.reserve(cells.size());
  for (const auto& [key, cell] : cells)
    if (static_cast<int>(cell.members.size()) >= n_min) ordered.push_back(&cell);
  std::sort(ordered.begin(), ordered.end(), [](const Cell* a, const Cell* b) {
    return a->cx != b->cx ? a->cx < b->cx : a->cy < b->cy;
  });

  set.points.reserve(ordered.size());
  for (const Cell* cell : ordered) {
    double wsum = 0.0;
    Vec2 mean = Vec2::Zero();
    for (int idx : cell->members) {
      wsum += points[idx].intensity;
      mean += points[idx].intensity * points[idx].position;
    }
    mean /= wsum;

    Mat2 cov = Mat2::Zero();
    for (int idx : cell->members) {
      const Vec2 d = points[idx].position - mean;
      cov += points[idx].intensity * d * d.transpose();
    }
    cov /= wsum;

    SymEigen2 eig = sym_eigen2(cov);
    const double floor_val = std::max(kCovAbsFloor, kCovRelFloor * eig.eval_max);
    const double lo = std::max(eig.eval_min, floor_val);
    const double hi = std::max(eig.eval_max, floor_val);
    Mat2 reg = lo * eig.evec_min * eig.evec_min.transpose() +
               hi * eig.evec_max * eig.evec_max.transpose();

    SurfacePoint sp;
    sp.mean = mean;
    sp.covariance = 0.5 * (reg + reg.transpose());
    sp.normal = disambiguate_normal(eig.evec_min, mean);
    sp.support = static_cast<int>(cell->members.size());
    sp.intensity_sum = wsum;
    set.points.push_back(sp);
  }
  return set;
}

}  // namespace cfear
