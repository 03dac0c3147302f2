#include "cfear/scan_io.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cfear {

void PolarScan::validate() const {
  if (num_azimuths < 1 || num_range_bins < 1) throw EmptyScan("scan has no azimuths or no range bins");
  const size_t cells = static_cast<size_t>(num_azimuths) * num_range_bins;
  if (intensities.size() != cells || azimuth_angles.size() != static_cast<size_t>(num_azimuths) ||
      azimuth_times.size() != static_cast<size_t>(num_azimuths))
    throw InvalidScan("scan buffer sizes inconsistent with declared dimensions");
  if (!(range_resolution > 0.0)) throw InvalidScan("range_resolution must be > 0");
  if (!(range_offset >= 0.0)) throw InvalidScan("range_offset must be >= 0");
  for (float v : intensities)
    if (!std::isfinite(v) || v < 0.0f) throw InvalidScan("intensity not finite or negative");
  const double two_pi = 2.0 * M_PI;
  for (int i = 0; i < num_azimuths; ++i) {
    const double a = azimuth_angles[i];
    if (!(a >= 0.0 && a < two_pi)) throw InvalidScan("azimuth angle outside [0, 2pi)");
    if (i > 0 && !(a > azimuth_angles[i - 1])) throw InvalidScan("azimuth angles not strictly increasing");
    if (i > 0 && azimuth_times[i] < azimuth_times[i - 1])
      throw NonMonotoneTimestamps("azimuth timestamps decrease within the sweep");
  }
  if (azimuth_times.back() - azimuth_times.front() >= kMaxSweepSeconds)
    throw InvalidScan("sweep spans more than one rotation period");
}

namespace {

constexpr int kHeaderCols = 10;  // 8 bytes timestamp + 2 bytes azimuth

struct Gray8 {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> pixels;  // row-major
};

bool has_png_magic(const uint8_t* bytes, size_t n) {
  static const uint8_t magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return n >= 8 && std::memcmp(bytes, magic, 8) == 0;
}

Gray8 decode_pgm(const std::vector<uint8_t>& bytes, const std::string& name) {
  size_t pos = 0;
  auto next_token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string tok;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) tok.push_back(static_cast<char>(bytes[pos++]));
    return tok;
  };
  if (next_token() != "P5") throw ParseError(name + ": not a binary PGM");
  Gray8 img;
  int maxval = 0;
  try {
    img.width = std::stoi(next_token());
    img.height = std::stoi(next_token());
    maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw ParseError(name + ": malformed PGM header");
  }
  if (maxval != 255) throw ParseError(name + ": PGM maxval must be 255");
  if (img.width <= 0 || img.height <= 0) throw EmptyScan(name + ": empty image");
  ++pos;  // single whitespace after maxval
  const size_t need = static_cast<size_t>(img.width) * img.height;
  if (bytes.size() - pos < need) throw ParseError(name + ": truncated PGM payload");
  img.pixels.assign(bytes.begin() + pos, bytes.begin() + pos + need);
  return img;
}

Gray8 decode_png(const std::filesystem::path& path) {
  FILE* f = std::fopen(path.string().c_str(), "rb");
  if (!f) throw ParseError(path.string() + ": cannot open");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    std::fclose(f);
    throw ParseError(path.string() + ": libpng init failed");
  }

  Gray8 img;
  std::vector<png_bytep> rows;
  volatile bool failed = false;
  if (setjmp(png_jmpbuf(png))) {
    failed = true;
  } else {
    png_init_io(png, f);
    png_read_info(png, info);
    png_uint_32 w = 0, h = 0;
    int bit_depth = 0, color_type = 0;
    png_get_IHDR(png, info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);
    if (color_type != PNG_COLOR_TYPE_GRAY) {
      png_destroy_read_struct(&png, &info, nullptr);
      std::fclose(f);
      throw ParseError(path.string() + ": polar images must be 8-bit grayscale PNG");
    }
    if (bit_depth == 16) png_set_strip_16(png);
    if (bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    png_read_update_info(png, info);
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.pixels.resize(static_cast<size_t>(img.width) * img.height);
    rows.resize(img.height);
    for (int r = 0; r < img.height; ++r)
      rows[r] = img.pixels.data() + static_cast<size_t>(r) * img.width;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(f);
  if (failed) throw ParseError(path.string() + ": PNG decode failed");
  if (img.width <= 0 || img.height <= 0) throw EmptyScan(path.string() + ": empty image");
  return img;
}

void encode_png(const std::filesystem::path& path, const Gray8& img) {
  FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw ParseError(path.string() + ": cannot open for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    std::fclose(f);
    throw ParseError(path.string() + ": libpng init failed");
  }
  std::vector<png_bytep> rows(img.height);
  for (int r = 0; r < img.height; ++r)
    rows[r] = const_cast<png_bytep>(img.pixels.data() + static_cast<size_t>(r) * img.width);
  volatile bool failed = false;
  if (setjmp(png_jmpbuf(png))) {
    failed = true;
  } else {
    png_init_io(png, f);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
  std::fclose(f);
  if (failed) throw ParseError(path.string() + ": PNG encode failed");
}

void encode_pgm(const std::filesystem::path& path, const Gray8& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path.string() + ": cannot open for writing");
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw ParseError(path.string() + ": write failed");
}

std::vector<uint8_t> read_all_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Sorts rows of a freshly parsed scan by azimuth angle, then validates.
PolarScan assemble_sorted(int n_az, int n_bins, std::vector<double>&& times,
                          std::vector<double>&& angles, std::vector<float>&& cells,
                          const RangeMeta& meta, uint64_t scan_id) {
  std::vector<int> order(n_az);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return angles[a] < angles[b]; });

  PolarScan scan;
  scan.num_azimuths = n_az;
  scan.num_range_bins = n_bins;
  scan.range_resolution = meta.range_resolution;
  scan.range_offset = meta.range_offset;
  scan.scan_id = scan_id;
  scan.azimuth_angles.resize(n_az);
  scan.azimuth_times.resize(n_az);
  scan.intensities.resize(static_cast<size_t>(n_az) * n_bins);
  for (int i = 0; i < n_az; ++i) {
    const int src = order[i];
    scan.azimuth_angles[i] = angles[src];
    scan.azimuth_times[i] = times[src];
    std::copy_n(cells.begin() + static_cast<size_t>(src) * n_bins, n_bins,
                scan.intensities.begin() + static_cast<size_t>(i) * n_bins);
  }
  scan.validate();
  return scan;
}

double parse_double_token(std::string_view tok, const std::string& where) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last) throw ParseError(where + ": bad number '" + std::string(tok) + "'");
  return v;
}

template <typename T>
void append_number(std::string& out, T v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, p);
}

}  // namespace

PolarScan load_polar_image(const std::filesystem::path& path, const RangeMeta& meta,
                           uint64_t scan_id) {
  const std::vector<uint8_t> bytes = read_all_bytes(path);
  Gray8 img;
  if (has_png_magic(bytes.data(), bytes.size())) {
    img = decode_png(path);
  } else {
    img = decode_pgm(bytes, path.string());
  }
  if (img.height < 1) throw EmptyScan(path.string() + ": no azimuth rows");
  if (img.width < kHeaderCols)
    throw MalformedRow(path.string() + ": row shorter than the 10-byte header");
  const int n_bins = img.width - kHeaderCols;
  if (n_bins < 1) throw EmptyScan(path.string() + ": rows carry no range bins");

  const int n_az = img.height;
  std::vector<double> times(n_az), angles(n_az);
  std::vector<float> cells(static_cast<size_t>(n_az) * n_bins);
  for (int r = 0; r < n_az; ++r) {
    const uint8_t* row = img.pixels.data() + static_cast<size_t>(r) * img.width;
    uint64_t ns = 0;
    for (int b = 7; b >= 0; --b) ns = (ns << 8) | row[b];
    const uint16_t az_units = static_cast<uint16_t>(row[8] | (row[9] << 8));
    times[r] = static_cast<double>(ns) * 1e-9;
    angles[r] = static_cast<double>(az_units) * (2.0 * M_PI / 65536.0);
    float* dst = cells.data() + static_cast<size_t>(r) * n_bins;
    for (int b = 0; b < n_bins; ++b) dst[b] = static_cast<float>(row[kHeaderCols + b]) / 255.0f;
  }
  return assemble_sorted(n_az, n_bins, std::move(times), std::move(angles), std::move(cells),
                         meta, scan_id);
}

void write_polar_image(const std::filesystem::path& path, const PolarScan& scan) {
  Gray8 img;
  img.width = scan.num_range_bins + kHeaderCols;
  img.height = scan.num_azimuths;
  img.pixels.resize(static_cast<size_t>(img.width) * img.height);
  for (int r = 0; r < scan.num_azimuths; ++r) {
    uint8_t* row = img.pixels.data() + static_cast<size_t>(r) * img.width;
    const uint64_t ns = static_cast<uint64_t>(std::llround(scan.azimuth_times[r] * 1e9));
    for (int b = 0; b < 8; ++b) row[b] = static_cast<uint8_t>((ns >> (8 * b)) & 0xff);
    const auto az_units = static_cast<uint16_t>(
        std::lround(scan.azimuth_angles[r] * (65536.0 / (2.0 * M_PI))) & 0xffff);
    row[8] = static_cast<uint8_t>(az_units & 0xff);
    row[9] = static_cast<uint8_t>(az_units >> 8);
    for (int b = 0; b < scan.num_range_bins; ++b) {
      const float v = std::clamp(scan.at(r, b), 0.0f, 1.0f);
      row[kHeaderCols + b] = static_cast<uint8_t>(std::lround(v * 255.0f));
    }
  }
  if (path.extension() == ".pgm") {
    encode_pgm(path, img);
  } else {
    encode_png(path, img);
  }
}

PolarScan load_polar_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");

  bool have_res = false, have_off = false, have_id = false;
  RangeMeta meta;
  uint64_t scan_id = 0;
  std::vector<double> times, angles;
  std::vector<float> cells;
  int n_bins = -1;
  int line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    const auto comma = line.find(',');
    if (eq != std::string::npos && (comma == std::string::npos || eq < comma)) {
      const std::string key = line.substr(0, eq);
      const std::string val = line.substr(eq + 1);
      if (key == "range_resolution") {
        meta.range_resolution = parse_double_token(val, where);
        have_res = true;
      } else if (key == "range_offset") {
        meta.range_offset = parse_double_token(val, where);
        have_off = true;
      } else if (key == "scan_id") {
        scan_id = static_cast<uint64_t>(parse_double_token(val, where));
        have_id = true;
      } else {
        throw ParseError(where + ": unknown header key '" + key + "'");
      }
      continue;
    }
    // Data row: t_sec,azimuth_rad,i_0,...
    std::vector<std::string_view> toks;
    size_t start = 0;
    const std::string_view sv = line;
    while (true) {
      const size_t c = sv.find(',', start);
      toks.push_back(sv.substr(start, c == std::string_view::npos ? c : c - start));
      if (c == std::string_view::npos) break;
      start = c + 1;
    }
    if (toks.size() < 3) throw MalformedRow(where + ": expected t,azimuth and at least one bin");
    if (n_bins < 0) {
      n_bins = static_cast<int>(toks.size()) - 2;
    } else if (static_cast<int>(toks.size()) - 2 != n_bins) {
      throw MalformedRow(where + ": expected " + std::to_string(n_bins) + " intensity values");
    }
    times.push_back(parse_double_token(toks[0], where));
    angles.push_back(parse_double_token(toks[1], where));
    for (size_t i = 2; i < toks.size(); ++i)
      cells.push_back(static_cast<float>(parse_double_token(toks[i], where)));
  }
  if (!have_res) throw ParseError(path.string() + ": missing range_resolution header");
  if (!have_off) throw ParseError(path.string() + ": missing range_offset header");
  if (!have_id) throw ParseError(path.string() + ": missing scan_id header");
  if (times.empty()) throw EmptyScan(path.string() + ": no azimuth rows");

  return assemble_sorted(static_cast<int>(times.size()), n_bins, std::move(times),
                         std::move(angles), std::move(cells), meta, scan_id);
}

void write_polar_csv(const std::filesystem::path& path, const PolarScan& scan) {
  std::string out;
  out.reserve(static_cast<size_t>(scan.num_azimuths) * (scan.num_range_bins * 6 + 48) + 96);
  out += "range_resolution=";
  append_number(out, scan.range_resolution);
  out += "\nrange_offset=";
  append_number(out, scan.range_offset);
  out += "\nscan_id=";
  append_number(out, scan.scan_id);
  out += '\n';
  for (int r = 0; r < scan.num_azimuths; ++r) {
    append_number(out, scan.azimuth_times[r]);
    out += ',';
    append_number(out, scan.azimuth_angles[r]);
    for (int b = 0; b < scan.num_range_bins; ++b) {
      out += ',';
      append_number(out, scan.at(r, b));
    }
    out += '\n';
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError(path.string() + ": cannot open for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw ParseError(path.string() + ": write failed");
}

}  // namespace cfear
