#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "cfear/features.hpp"
#include "cfear/geometry.hpp"

namespace cfear {

/// Spatial hash over surface-point means. With query radius <= cell_size the
/// 3x3 cell neighborhood is guaranteed to contain every candidate, so lookups
/// are exact and O(1) expected.
class HashGrid {
 public:
  HashGrid() = default;
  HashGrid(double cell_size, size_t expected_points);

  void insert(int index, const Vec2& mean);

  double cell_size() const { return cell_size_; }
  size_t bucket_count() const { return buckets_.size(); }

  /// Index of the stored point closest to `query` within `radius`, ties by
  /// lowest index; nullopt when none qualifies. Throws RadiusExceedsCell when
  /// radius > cell_size (contract violation, not a data error).
  std::optional<int> nearest_within(const SurfacePointSet& set, const Vec2& query,
                                    double radius) const;

 private:
  struct Entry {
    int index;
    Vec2 mean;
  };
  static uint64_t key(int32_t cx, int32_t cy) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(cx)) << 32) |
           static_cast<uint64_t>(static_cast<uint32_t>(cy));
  }
  struct KeyHash {
    size_t operator()(uint64_t k) const {
      // splitmix64 finalizer
      k += 0x9e3779b97f4a7c15ull;
      k = (k ^ (k >> 30)) * 0xbf58476d1ce4e5b9ull;
      k = (k ^ (k >> 27)) * 0x94d049bb133111ebull;
      return static_cast<size_t>(k ^ (k >> 31));
    }
  };

  double cell_size_ = 1.0;
  double inv_cell_ = 1.0;
  std::unordered_map<uint64_t, std::vector<Entry>, KeyHash> buckets_;
};

/// Builds the lookup structure over a surface-point set. O(n) expected.
HashGrid build_hash_grid(const SurfacePointSet& set, double cell_size);

}  // namespace cfear
