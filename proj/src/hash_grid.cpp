#include "cfear/hash_grid.hpp"

#include <cmath>

#include "cfear/errors.hpp"

namespace cfear {

HashGrid::HashGrid(double cell_size, size_t expected_points)
    : cell_size_(cell_size), inv_cell_(1.0 / cell_size) {
  buckets_.reserve(expected_points);
}

void HashGrid::insert(int index, const Vec2& mean) {
  const auto cx = static_cast<int32_t>(std::floor(mean.x() * inv_cell_));
  const auto cy = static_cast<int32_t>(std::floor(mean.y() * inv_cell_));
  buckets_[key(cx, cy)].push_back({index, mean});
}

std::optional<int> HashGrid::nearest_within([[maybe_unused]] const SurfacePointSet& set,
                                            const Vec2& query, double radius) const {
  // Means are cached in the buckets; the set only defines the index space.
  if (radius > cell_size_)
    throw RadiusExceedsCell("query radius exceeds hash-grid cell size");
  const auto cx = static_cast<int32_t>(std::floor(query.x() * inv_cell_));
  const auto cy = static_cast<int32_t>(std::floor(query.y() * inv_cell_));
  const double r2 = radius * radius;
  double best_d2 = r2;
  int best_index = -1;
  bool found = false;
  for (int32_t dx = -1; dx <= 1; ++dx) {
    for (int32_t dy = -1; dy <= 1; ++dy) {
      const auto it = buckets_.find(key(cx + dx, cy + dy));
      if (it == buckets_.end()) continue;
      for (const Entry& e : it->second) {
        const double d2 = (e.mean - query).squaredNorm();
        if (d2 > r2) continue;
        if (!found || d2 < best_d2 || (d2 == best_d2 && e.index < best_index)) {
          best_d2 = d2;
          best_index = e.index;
          found = true;
        }
      }
    }
  }
  if (!found) return std::nullopt;
  return best_index;
}

HashGrid build_hash_grid(const SurfacePointSet& set, double cell_size) {
  HashGrid grid(cell_size, set.points.size());
  for (int i = 0; i < static_cast<int>(set.points.size()); ++i)
    grid.insert(i, set.points[i].mean);
  return grid;
}

}  // namespace cfear
