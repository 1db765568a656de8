#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace invnav {

struct BenchConfig {
  std::vector<int> beams{128, 256, 512, 1024};
  std::vector<int> workers{1, 2, 4};
  int agents = 10;
  int reps = 5;
  std::uint64_t seed = 123;
};

// One grid cell of the planner-construction benchmark. An iteration is one
// planning pass over every agent; per-agent numbers divide that work by
// agent.
struct BenchRow {
  int beams = 0;
  int agents = 0;
  int workers = 0;
  double total_s = 0.0;
  double iter_mean_ms = 0.0;
  double iter_p50_ms = 0.0;
  double iter_p95_ms = 0.0;
  double agent_mean_ms = 0.0;
  double agent_p50_ms = 0.0;
  double agent_p95_ms = 0.0;
  double speedup = 0.0;  // 1-worker mean / this mean, within a (beams, agents) group
};

// Times build_planner_function over synthetic crowded scans. Serial and
// parallel outputs are compared bitwise before any timing; a mismatch
// throws (correctness precedes speed).
std::vector<BenchRow> run_bench(const BenchConfig& cfg, std::ostream* progress);

void write_bench_csv(std::span<const BenchRow> rows, std::ostream& out);

}  // namespace invnav
