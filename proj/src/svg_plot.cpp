#include "cfear/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cfear/errors.hpp"

namespace cfear {

namespace {

struct Mapper {
  double min_x, min_y, scale, height;
  double px(double x) const { return 40.0 + (x - min_x) * scale; }
  double py(double y) const { return height - 40.0 - (y - min_y) * scale; }
};

void append_polyline(std::string& svg, const Trajectory& traj, const Mapper& m,
                     const char* color) {
  svg += "  <polyline fill=\"none\" stroke=\"";
  svg += color;
  svg += "\" stroke-width=\"1.5\" points=\"";
  char buf[64];
  for (const TrajectoryPoint& p : traj) {
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", m.px(p.pose.x), m.py(p.pose.y));
    svg += buf;
  }
  svg += "\"/>\n";
}

void append_marker(std::string& svg, const Mapper& m, const Pose2& pose, const char* color,
                   bool square) {
  char buf[160];
  if (square) {
    std::snprintf(buf, sizeof(buf),
                  "  <rect x=\"%.2f\" y=\"%.2f\" width=\"8\" height=\"8\" fill=\"%s\"/>\n",
                  m.px(pose.x) - 4.0, m.py(pose.y) - 4.0, color);
  } else {
    std::snprintf(buf, sizeof(buf), "  <circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"%s\"/>\n",
                  m.px(pose.x), m.py(pose.y), color);
  }
  svg += buf;
}

}  // namespace

std::string render_trajectory_svg(const Trajectory& estimate, const Trajectory* ground_truth) {
  if (estimate.empty()) throw ParseError("cannot plot an empty trajectory");

  double min_x = estimate.front().pose.x, max_x = min_x;
  double min_y = estimate.front().pose.y, max_y = min_y;
  auto extend = [&](const Trajectory& t) {
    for (const TrajectoryPoint& p : t) {
      min_x = std::min(min_x, p.pose.x);
      max_x = std::max(max_x, p.pose.x);
      min_y = std::min(min_y, p.pose.y);
      max_y = std::max(max_y, p.pose.y);
    }
  };
  extend(estimate);
  if (ground_truth) extend(*ground_truth);

  const double span = std::max({max_x - min_x, max_y - min_y, 1.0});
  const double plot = 720.0;
  const double scale = plot / span;
  const double width = 80.0 + (max_x - min_x) * scale;
  const double height = 80.0 + (max_y - min_y) * scale;
  const Mapper m{min_x, min_y, scale, height};

  char buf[256];
  std::string svg;
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                "viewBox=\"0 0 %.0f %.0f\">\n",
                width, height, width, height);
  svg += buf;
  svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  if (ground_truth) append_polyline(svg, *ground_truth, m, "#888888");
  append_polyline(svg, estimate, m, "#1f6fd6");
  append_marker(svg, m, estimate.front().pose, "#0a8f2a", false);  // start
  append_marker(svg, m, estimate.back().pose, "#c02020", true);    // end

  // Scale bar: a round length close to a fifth of the span.
  const double target = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(target)));
  double bar = mag;
  for (double c : {5.0, 2.0, 1.0}) {
    if (c * mag <= target) {
      bar = c * mag;
      break;
    }
  }
  const double bar_px = bar * scale;
  std::snprintf(buf, sizeof(buf),
                "  <line x1=\"40\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\" "
                "stroke-width=\"2\"/>\n",
                height - 16.0, 40.0 + bar_px, height - 16.0);
  svg += buf;
  std::snprintf(buf, sizeof(buf),
                "  <text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" text-anchor=\"middle\">%g "
                "m</text>\n",
                40.0 + 0.5 * bar_px, height - 22.0, bar);
  svg += buf;

  if (ground_truth) {
    svg += "  <g font-size=\"12\">\n";
    svg += "    <line x1=\"50\" y1=\"20\" x2=\"80\" y2=\"20\" stroke=\"#1f6fd6\" "
           "stroke-width=\"2\"/>\n";
    svg += "    <text x=\"86\" y=\"24\">estimate</text>\n";
    svg += "    <line x1=\"160\" y1=\"20\" x2=\"190\" y2=\"20\" stroke=\"#888888\" "
           "stroke-width=\"2\"/>\n";
    svg += "    <text x=\"196\" y=\"24\">ground truth</text>\n";
    svg += "  </g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace cfear
