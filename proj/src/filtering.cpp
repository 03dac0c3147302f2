#include "cfear/filtering.hpp"

#include <algorithm>

namespace cfear {

std::vector<FilteredPoint> k_strongest(const PolarScan& scan, const FilterConfig& cfg) {
  std::vector<FilteredPoint> out;
  out.reserve(static_cast<size_t>(scan.num_azimuths) * std::min(cfg.k, scan.num_range_bins));

  // First bin whose center range is >= r_min.
  int first_bin = 0;
  if (cfg.r_min > 0.0) {
    const double b = (cfg.r_min - scan.range_offset) / scan.range_resolution - 0.5;
    first_bin = std::max(0, static_cast<int>(std::ceil(b - 1e-12)));
  }
  const float threshold = static_cast<float>(cfg.z_min);
  const RangeMeta meta = scan.meta();

  struct Candidate {
    float intensity;
    int bin;
  };
  std::vector<Candidate> cands;
  cands.reserve(scan.num_range_bins);
  const auto stronger = [](const Candidate& a, const Candidate& b) {
    if (a.intensity != b.intensity) return a.intensity > b.intensity;
    return a.bin < b.bin;
  };

  for (int a = 0; a < scan.num_azimuths; ++a) {
    cands.clear();
    const float* row = scan.intensities.data() + static_cast<size_t>(a) * scan.num_range_bins;
    for (int b = first_bin; b < scan.num_range_bins; ++b) {
      if (row[b] > threshold) cands.push_back({row[b], b});
    }
    if (static_cast<int>(cands.size()) > cfg.k) {
      std::nth_element(cands.begin(), cands.begin() + cfg.k, cands.end(), stronger);
      cands.resize(cfg.k);
    }
    std::sort(cands.begin(), cands.end(), stronger);
    for (const Candidate& c : cands) {
      out.push_back({polar_to_cartesian(scan.azimuth_angles[a], c.bin, meta),
                     static_cast<double>(c.intensity), scan.azimuth_times[a], a});
    }
  }
  return out;
}

}  // namespace cfear
