#pragma once

#include <filesystem>
#include <string>

#include "cfear/polar_scan.hpp"

namespace cfear {

/// Loads a polar sweep stored as an 8-bit grayscale image (PNG or binary PGM,
/// detected by magic bytes). One image row per azimuth: columns 0-7 hold a
/// little-endian u64 timestamp in nanoseconds, columns 8-9 a little-endian u16
/// azimuth in units of 2pi/65536 rad, the remaining columns the range-intensity
/// profile. Range scale comes from the sidecar meta. Rows are sorted by azimuth
/// angle; intensities are normalized to [0, 1].
PolarScan load_polar_image(const std::filesystem::path& path, const RangeMeta& meta,
                           uint64_t scan_id = 0);

/// Writes a sweep in the image layout above (.png or .pgm by extension).
/// Angles and intensities are quantized to the wire format.
void write_polar_image(const std::filesystem::path& path, const PolarScan& scan);

/// Portable text format: header lines `range_resolution=`, `range_offset=`,
/// `scan_id=`, then one line per azimuth: `t_sec,azimuth_rad,i_0,i_1,...`.
PolarScan load_polar_csv(const std::filesystem::path& path);

/// Lossless inverse of load_polar_csv (shortest round-trip number formatting).
void write_polar_csv(const std::filesystem::path& path, const PolarScan& scan);

}  // namespace cfear
