#pragma once

#include <iosfwd>

#include "invnav/scenario.hpp"
#include "invnav/trajectory_log.hpp"

namespace invnav {

struct SvgOptions {
  int width_px = 900;
  int disc_stride = 8;  // draw every k-th invariant disc; 0 disables discs
};

// Trajectory plot: per-agent traces with invariant-disc overlays, start and
// target markers, scripted obstacles. Plain deterministic text (no
// timestamps), so golden diffs work.
void render_svg(const TrajectoryLog& log, const ScenarioConfig& cfg, std::ostream& out,
                const SvgOptions& options = {});

}  // namespace invnav
