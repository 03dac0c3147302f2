#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cfear/config.hpp"
#include "cfear/errors.hpp"
#include "cfear/evaluation.hpp"
#include "cfear/odometry.hpp"
#include "cfear/scan_io.hpp"
#include "cfear/svg_plot.hpp"
#include "cfear/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitEvalInfeasible = 3;

std::vector<fs::path> list_scan_files(const fs::path& dir, const std::string& format) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (format == "csv" && ext == ".csv") files.push_back(entry.path());
    if (format == "image" && (ext == ".png" || ext == ".pgm")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw cfear::ParseError(tmp.string() + ": write failed");
  }
  fs::rename(tmp, path);
}

struct RunArgs {
  std::string input;
  std::string format = "csv";
  std::string preset = "cfear-3";
  std::vector<std::string> overrides;
  std::string out;
};

int cmd_run(const RunArgs& args) {
  cfear::OdometryConfig cfg = cfear::preset(args.preset);
  for (const std::string& kv : args.overrides) cfear::apply_override(cfg, kv);
  if (args.format != "csv" && args.format != "image")
    throw cfear::ParseError("unknown format '" + args.format + "' (expected csv|image)");

  const fs::path input(args.input);
  if (!fs::is_directory(input)) throw cfear::ParseError(args.input + ": not a directory");
  const auto files = list_scan_files(input, args.format);
  if (files.empty()) throw cfear::ParseError(args.input + ": no scans in " + args.format + " format");

  cfear::RangeMeta meta;
  if (args.format == "image") {
    const fs::path sidecar = input / "meta.cfg";
    if (!fs::exists(sidecar))
      throw cfear::ParseError(sidecar.string() +
                              ": missing sidecar (range_resolution=..., range_offset=...)");
    const auto kv = cfear::read_key_value_file(sidecar);
    const auto res = kv.find("range_resolution");
    const auto off = kv.find("range_offset");
    if (res == kv.end()) throw cfear::ParseError(sidecar.string() + ": missing range_resolution");
    meta.range_resolution = std::stod(res->second);
    meta.range_offset = off != kv.end() ? std::stod(off->second) : 0.0;
  }

  const fs::path out_dir(args.out);
  fs::create_directories(out_dir);

  cfear::OdometryPipeline pipeline(cfg);
  cfear::Trajectory trajectory;
  std::string timing_csv = "scan,load_s,filter_s,features_s,register_s,process_s\n";
  double wall_load = 0.0, wall_filter = 0.0, wall_features = 0.0, wall_register = 0.0;
  int keyframe_count = 0, fallback_count = 0;

  using clock = std::chrono::steady_clock;
  for (size_t i = 0; i < files.size(); ++i) {
    const auto t0 = clock::now();
    cfear::PolarScan scan = (args.format == "csv")
                                ? cfear::load_polar_csv(files[i])
                                : cfear::load_polar_image(files[i], meta, i);
    const double load_s = std::chrono::duration<double>(clock::now() - t0).count();

    const cfear::OdometryUpdate u = pipeline.process_scan(scan);
    trajectory.push_back({u.t_ref, u.pose});
    if (u.new_keyframe) ++keyframe_count;
    if (u.fallback) {
      ++fallback_count;
      std::cerr << "warning: degenerate registration on scan " << i
                << ", falling back to the motion prior\n";
    }
    wall_load += load_s;
    wall_filter += u.timing.filter_s;
    wall_features += u.timing.features_s;
    wall_register += u.timing.register_s;
    char row[192];
    std::snprintf(row, sizeof(row), "%zu,%.6f,%.6f,%.6f,%.6f,%.6f\n", i, load_s,
                  u.timing.filter_s, u.timing.features_s, u.timing.register_s,
                  u.timing.total_s());
    timing_csv += row;
  }

  cfear::write_trajectory(out_dir / "trajectory.txt", trajectory);
  cfear::write_trajectory_kitti(out_dir / "trajectory_kitti.txt", trajectory);
  write_text_atomic(out_dir / "timing.csv", timing_csv);

  const double wall_process = wall_filter + wall_features + wall_register;
  const auto n = static_cast<double>(files.size());
  json manifest;
  manifest["input"] = args.input;
  manifest["format"] = args.format;
  manifest["preset"] = args.preset;
  manifest["overrides"] = args.overrides;
  manifest["output"] = args.out;
  manifest["trajectory"] = (out_dir / "trajectory.txt").string();
  manifest["scans"] = files.size();
  manifest["keyframes"] = keyframe_count;
  manifest["degenerate_fallbacks"] = fallback_count;
  manifest["timing"] = {
      {"wall_load_s", wall_load},       {"wall_filter_s", wall_filter},
      {"wall_features_s", wall_features}, {"wall_register_s", wall_register},
      {"wall_process_s", wall_process},
      {"hz_process", wall_process > 0.0 ? n / wall_process : 0.0},
      {"hz_filter", wall_filter > 0.0 ? n / wall_filter : 0.0},
      {"hz_features", wall_features > 0.0 ? n / wall_features : 0.0},
      {"hz_register", wall_register > 0.0 ? n / wall_register : 0.0},
  };
  write_text_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");

  std::cout << "processed " << files.size() << " scans, " << keyframe_count << " keyframes, "
            << (wall_process > 0.0 ? n / wall_process : 0.0) << " Hz (processing loop)\n";
  return kExitOk;
}

int cmd_eval(const std::string& est_path, const std::string& gt_path, const std::string& out) {
  const cfear::Trajectory est = cfear::read_trajectory(est_path);
  const cfear::Trajectory gt = cfear::read_trajectory(gt_path);
  cfear::DriftReport report;
  try {
    report = cfear::evaluate_drift(est, gt);
  } catch (const cfear::TooShort& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEvalInfeasible;
  } catch (const cfear::NoTimeOverlap& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEvalInfeasible;
  }
  std::cout << report.pair_string() << "\n";
  if (!out.empty()) {
    json j;
    j["translation_error_percent"] = report.translation_error_percent;
    j["rotation_error_deg_per_100m"] = report.rotation_error_deg_per_100m;
    j["segments"] = report.segment_count;
    j["dropped_matches"] = report.dropped_matches;
    j["per_length"] = json::array();
    for (const auto& pl : report.per_length) {
      j["per_length"].push_back({{"length_m", pl.length_m},
                                 {"translation_error_percent", pl.translation_error_percent},
                                 {"rotation_error_deg_per_100m", pl.rotation_error_deg_per_100m},
                                 {"segments", pl.segments}});
    }
    write_text_atomic(out, j.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_synth(const std::string& scenario_name, uint64_t seed, int frames,
              const std::string& out) {
  const cfear::Scenario sc = cfear::make_scenario(scenario_name, seed);
  const cfear::SyntheticSequence seq =
      cfear::generate_sequence(sc.world, sc.path, sc.sim, sc.frame_rate, frames);
  const fs::path out_dir(out);
  fs::create_directories(out_dir);
  for (size_t i = 0; i < seq.scans.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "scan_%06zu.csv", i);
    cfear::write_polar_csv(out_dir / name, seq.scans[i]);
  }
  cfear::write_trajectory(out_dir / "gt.txt", seq.ground_truth);
  cfear::save_world(out_dir / "world.txt", sc.world);
  std::cout << "wrote " << seq.scans.size() << " scans to " << out << "\n";
  return kExitOk;
}

int cmd_plot(const std::string& est_path, const std::string& gt_path, const std::string& svg) {
  const cfear::Trajectory est = cfear::read_trajectory(est_path);
  if (est.empty()) throw cfear::ParseError(est_path + ": empty trajectory");
  cfear::Trajectory gt;
  if (!gt_path.empty()) gt = cfear::read_trajectory(gt_path);
  const std::string out = cfear::render_trajectory_svg(est, gt.empty() ? nullptr : &gt);
  write_text_atomic(svg, out);
  std::cout << "wrote " << svg << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cfear: spinning 2D radar odometry, evaluation and synthetic data"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run odometry over a directory of scans");
  run->add_option("--input", run_args.input, "directory of scans, ordered by filename")
      ->required();
  run->add_option("--format", run_args.format, "scan format: csv|image");
  run->add_option("--preset", run_args.preset, "cfear-3|cfear-ctf|cfear-ctf-s10");
  run->add_option("--set", run_args.overrides, "config override key=value (repeatable)");
  run->add_option("--out", run_args.out, "output directory")->required();

  std::string eval_input, eval_gt, eval_out;
  CLI::App* eval = app.add_subcommand("eval", "drift metric between trajectories");
  eval->add_option("--input", eval_input, "estimated trajectory file")->required();
  eval->add_option("--gt", eval_gt, "ground-truth trajectory file")->required();
  eval->add_option("--out", eval_out, "per-length JSON breakdown path");

  std::string synth_scenario, synth_out;
  uint64_t synth_seed = 0;
  int synth_frames = -1;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic scan sequence");
  synth->add_option("--scenario", synth_scenario, "scenario name")->required();
  synth->add_option("--seed", synth_seed, "rng seed");
  synth->add_option("--frames", synth_frames, "frame count limit");
  synth->add_option("--out", synth_out, "output directory")->required();

  std::string plot_input, plot_gt, plot_svg;
  CLI::App* plot = app.add_subcommand("plot", "render trajectories to SVG");
  plot->add_option("--input", plot_input, "trajectory file")->required();
  plot->add_option("--gt", plot_gt, "ground-truth trajectory file");
  plot->add_option("--svg", plot_svg, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (eval->parsed()) return cmd_eval(eval_input, eval_gt, eval_out);
    if (synth->parsed()) return cmd_synth(synth_scenario, synth_seed, synth_frames, synth_out);
    if (plot->parsed()) return cmd_plot(plot_input, plot_gt, plot_svg);
  } catch (const cfear::UnknownPreset& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const cfear::UnknownScenario& e) {
    std::cerr << "error: " << e.what() << "\nknown scenarios:";
    for (const std::string& n : cfear::scenario_names()) std::cerr << " " << n;
    std::cerr << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
