#pragma once

#include <span>
#include <string>
#include <vector>

#include "invnav/scenario.hpp"
#include "invnav/simulator.hpp"
#include "invnav/trajectory_log.hpp"

namespace invnav {

// Sum of consecutive Euclidean distances.
double path_length(std::span<const Vec2> trace);

// Piecewise-linear re-sampling at uniform arc-length spacing. Stationary
// stretches add no samples; corners survive as corners.
std::vector<Vec2> resample_arc_length(std::span<const Vec2> trace, double spacing);

// Discrete three-point curvature: 4*area / (|a||b||c|).
double menger_curvature(const Vec2& p0, const Vec2& p1, const Vec2& p2);

// Mean Menger curvature over interior samples of the arc-length-resampled
// trace; degenerate (collinear/duplicate) triples are skipped. Zero for
// all-degenerate traces.
double avg_curvature(std::span<const Vec2> trace, double spacing = 0.02);

// Nearest-rank percentile; p in [0, 100].
double percentile(std::vector<double> values, double p);

struct PlanTimingStats {
  bool available = false;
  double mean_ms = 0.0;
  double p50_ms = 0.0;
  double p95_ms = 0.0;
};

struct AgentMetrics {
  int id = 0;
  bool converged = false;
  double time_to_target = -1.0;
  double path_length = 0.0;
  double avg_curvature = 0.0;
  double straight_line = 0.0;  // |start - target|
};

struct RunMetrics {
  bool all_converged = false;
  double completion_time = -1.0;
  double min_agent_clearance = 0.0;
  double min_obstacle_clearance = 0.0;
  long safety_violations = 0;
  long invariance_violations = 0;
  std::vector<AgentMetrics> agents;
  PlanTimingStats plan_timing;  // per planning event; filled in timings mode only
};

RunMetrics compute_run_metrics(const TrajectoryLog& log, const ScenarioConfig& cfg,
                               const RunStats& stats);

// Per-agent traces grouped from the log (ordered by time).
std::vector<std::pair<int, std::vector<Vec2>>> agent_traces(const TrajectoryLog& log);

// metrics JSON document (deterministic key order and float formatting).
std::string metrics_json(const RunMetrics& m, const ScenarioConfig& cfg);

// Comparison table: one line per agent with both strategies' path length
// and average curvature side by side.
struct CompareRow {
  int agent = 0;
  double path_len_decoupled = 0.0;
  double path_len_proposed = 0.0;
  double curvature_decoupled = 0.0;
  double curvature_proposed = 0.0;
};
std::vector<CompareRow> compare_rows(const RunMetrics& proposed, const RunMetrics& decoupled);
void write_compare_csv(std::span<const CompareRow> rows, std::ostream& out);

}  // namespace invnav
