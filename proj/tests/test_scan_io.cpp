#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "cfear/scan_io.hpp"

using namespace cfear;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "cfear_scan_io_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir / name;
}

// Raw polar-image row bytes: u64 LE nanoseconds, u16 LE azimuth units, bins.
std::vector<uint8_t> make_row(uint64_t t_ns, uint16_t az_units,
                              const std::vector<uint8_t>& bins) {
  std::vector<uint8_t> row(10 + bins.size());
  for (int b = 0; b < 8; ++b) row[b] = static_cast<uint8_t>((t_ns >> (8 * b)) & 0xff);
  row[8] = static_cast<uint8_t>(az_units & 0xff);
  row[9] = static_cast<uint8_t>(az_units >> 8);
  std::copy(bins.begin(), bins.end(), row.begin() + 10);
  return row;
}

void write_pgm(const fs::path& path, int width, const std::vector<std::vector<uint8_t>>& rows) {
  std::ofstream f(path, std::ios::binary);
  f << "P5\n" << width << " " << rows.size() << "\n255\n";
  for (const auto& r : rows)
    f.write(reinterpret_cast<const char*>(r.data()), static_cast<std::streamsize>(r.size()));
}

PolarScan random_scan(std::mt19937& rng, int n_az, int n_bins) {
  std::uniform_real_distribution<float> ui(0.0f, 1.0f);
  PolarScan s;
  s.num_azimuths = n_az;
  s.num_range_bins = n_bins;
  s.range_resolution = 0.25;
  s.range_offset = 0.5;
  s.scan_id = 42;
  s.intensities.resize(static_cast<size_t>(n_az) * n_bins);
  for (float& v : s.intensities) v = ui(rng);
  for (int i = 0; i < n_az; ++i) {
    s.azimuth_angles.push_back(2.0 * M_PI * i / n_az);
    s.azimuth_times.push_back(1000.0 + 0.25 * i / n_az);
  }
  return s;
}

}  // namespace

TEST_CASE("image loader reads constructed headers back") {
  // 400 rows x (10 header + 64 bins); the dataset-sized 3768-bin case is the
  // same code path, kept small here.
  const int n_az = 400, n_bins = 64;
  std::vector<std::vector<uint8_t>> rows;
  for (int i = 0; i < n_az; ++i) {
    std::vector<uint8_t> bins(n_bins, 0);
    bins[i % n_bins] = 200;
    const auto az_units = static_cast<uint16_t>(i * 65536 / n_az);
    rows.push_back(make_row(1'000'000'000ull + i * 625'000ull, az_units, bins));
  }
  const fs::path p = temp_file("constructed.pgm");
  write_pgm(p, 10 + n_bins, rows);

  const PolarScan scan = load_polar_image(p, {0.25, 0.0}, 7);
  CHECK(scan.num_azimuths == n_az);
  CHECK(scan.num_range_bins == n_bins);
  CHECK(scan.scan_id == 7);
  CHECK(scan.azimuth_times.front() == doctest::Approx(1.0));
  CHECK(scan.azimuth_angles.front() == doctest::Approx(0.0));
  CHECK(scan.at(3, 3) == doctest::Approx(200.0f / 255.0f));
}

TEST_CASE("single-azimuth all-zero scan is the degenerate minimum") {
  std::vector<std::vector<uint8_t>> rows{
      make_row(5'000'000'000ull, 0, std::vector<uint8_t>(8, 0))};
  const fs::path p = temp_file("tiny.pgm");
  write_pgm(p, 18, rows);
  const PolarScan scan = load_polar_image(p, {1.0, 0.0});
  CHECK(scan.num_azimuths == 1);
  CHECK(scan.num_range_bins == 8);
  CHECK(*std::max_element(scan.intensities.begin(), scan.intensities.end()) == 0.0f);
}

TEST_CASE("row shorter than the header is malformed") {
  std::vector<std::vector<uint8_t>> rows{std::vector<uint8_t>(8, 0)};
  const fs::path p = temp_file("short.pgm");
  write_pgm(p, 8, rows);
  CHECK_THROWS_AS(load_polar_image(p, {1.0, 0.0}), MalformedRow);
}

TEST_CASE("decreasing timestamp across azimuths is rejected") {
  std::vector<std::vector<uint8_t>> rows;
  rows.push_back(make_row(2'000'000'000ull, 0, {1, 2}));
  rows.push_back(make_row(1'900'000'000ull, 100, {3, 4}));
  const fs::path p = temp_file("nonmono.pgm");
  write_pgm(p, 12, rows);
  CHECK_THROWS_AS(load_polar_image(p, {1.0, 0.0}), NonMonotoneTimestamps);
}

TEST_CASE("png round trip through the image writer") {
  std::mt19937 rng(11);
  PolarScan scan = random_scan(rng, 16, 32);
  // Quantize to the wire format so the round trip is exact.
  for (float& v : scan.intensities) v = std::round(v * 255.0f) / 255.0f;
  for (double& a : scan.azimuth_angles)
    a = std::round(a * 65536.0 / (2.0 * M_PI)) * (2.0 * M_PI / 65536.0);
  const fs::path p = temp_file("roundtrip.png");
  write_polar_image(p, scan);
  const PolarScan back = load_polar_image(p, scan.meta(), scan.scan_id);
  CHECK(back.num_azimuths == scan.num_azimuths);
  CHECK(back.num_range_bins == scan.num_range_bins);
  for (size_t i = 0; i < scan.intensities.size(); ++i)
    CHECK(back.intensities[i] == doctest::Approx(scan.intensities[i]).epsilon(1e-6));
  for (int i = 0; i < scan.num_azimuths; ++i) {
    CHECK(back.azimuth_angles[i] == doctest::Approx(scan.azimuth_angles[i]).epsilon(1e-12));
    CHECK(back.azimuth_times[i] == doctest::Approx(scan.azimuth_times[i]).epsilon(1e-12));
  }
}

TEST_CASE("csv round trip is lossless") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const PolarScan scan = random_scan(rng, 1 + trial * 3, 1 + trial * 7);
    const fs::path p = temp_file("roundtrip.csv");
    write_polar_csv(p, scan);
    const PolarScan back = load_polar_csv(p);
    CHECK(back.num_azimuths == scan.num_azimuths);
    CHECK(back.num_range_bins == scan.num_range_bins);
    CHECK(back.range_resolution == scan.range_resolution);
    CHECK(back.range_offset == scan.range_offset);
    CHECK(back.scan_id == scan.scan_id);
    CHECK(back.intensities == scan.intensities);
    CHECK(back.azimuth_angles == scan.azimuth_angles);
    CHECK(back.azimuth_times == scan.azimuth_times);
  }
}

TEST_CASE("csv matrix layout matches the row order") {
  const fs::path p = temp_file("matrix.csv");
  std::ofstream f(p);
  f << "range_resolution=1\nrange_offset=0\nscan_id=3\n";
  f << "0.0,0.0,0,0.1,0.2,0.3\n";
  f << "0.1,1.5,0.4,0.5,0.6,0.7\n";
  f.close();
  const PolarScan scan = load_polar_csv(p);
  CHECK(scan.num_azimuths == 2);
  CHECK(scan.num_range_bins == 4);
  float expected = 0.0f;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 4; ++b) {
      CHECK(scan.at(a, b) == doctest::Approx(expected).epsilon(1e-6));
      expected += 0.1f;
    }
}

TEST_CASE("csv without range_resolution header fails to parse") {
  const fs::path p = temp_file("noheader.csv");
  std::ofstream f(p);
  f << "range_offset=0\nscan_id=0\n0.0,0.0,1,2\n";
  f.close();
  CHECK_THROWS_AS(load_polar_csv(p), ParseError);
}

TEST_CASE("csv rows are sorted by azimuth on load") {
  const fs::path p = temp_file("unsorted.csv");
  std::ofstream f(p);
  f << "range_resolution=1\nrange_offset=0\nscan_id=0\n";
  f << "0.0,2.0,9\n0.0,1.0,5\n";
  f.close();
  const PolarScan scan = load_polar_csv(p);
  CHECK(scan.azimuth_angles[0] == doctest::Approx(1.0));
  CHECK(scan.at(0, 0) == doctest::Approx(5.0f));
}

TEST_CASE("loader output always satisfies the scan invariants") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> na(1, 40), nb(1, 60);
  for (int trial = 0; trial < 25; ++trial) {
    const PolarScan scan = random_scan(rng, na(rng), nb(rng));
    const fs::path p = temp_file("prop.csv");
    write_polar_csv(p, scan);
    const PolarScan back = load_polar_csv(p);
    CHECK_NOTHROW(back.validate());
  }
}

TEST_CASE("validate rejects out-of-range and duplicate azimuths") {
  std::mt19937 rng(9);
  PolarScan scan = random_scan(rng, 4, 4);
  scan.azimuth_angles[2] = scan.azimuth_angles[1];
  CHECK_THROWS_AS(scan.validate(), InvalidScan);
  scan = random_scan(rng, 4, 4);
  scan.azimuth_angles[3] = 7.0;
  CHECK_THROWS_AS(scan.validate(), InvalidScan);
  scan = random_scan(rng, 4, 4);
  scan.azimuth_times[3] = scan.azimuth_times[0] + 0.6;
  CHECK_THROWS_AS(scan.validate(), InvalidScan);
  scan = random_scan(rng, 4, 4);
  scan.intensities[5] = -0.25f;
  CHECK_THROWS_AS(scan.validate(), InvalidScan);
}
