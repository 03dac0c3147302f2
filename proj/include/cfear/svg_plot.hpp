#pragma once

#include <optional>
#include <string>

#include "cfear/evaluation.hpp"

namespace cfear {

/// Renders trajectories as a standalone SVG: estimate (and optional ground
/// truth) polylines, start/end markers, a scale bar, and a legend when two
/// curves are shown.
std::string render_trajectory_svg(const Trajectory& estimate,
                                  const Trajectory* ground_truth = nullptr);

}  // namespace cfear
