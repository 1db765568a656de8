#include "invnav/bench.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "invnav/metrics.hpp"
#include "invnav/planner.hpp"
#include "invnav/rng.hpp"
#include "invnav/sensor.hpp"
#include "invnav/trajectory_log.hpp"

namespace invnav {

namespace {

PlannerConfig bench_planner(int beams) {
  PlannerConfig p;
  p.n_beams = beams;
  p.plan_hz = 10.0;
  p.max_range = 4.0;
  p.epsilon = 1e-3;
  p.v_max = 0.5;
  p.inflation = 0.1;
  return p;
}

// A crowded synthetic scene: agents scattered in a disc, each scanning all
// the others, so every scan carries a realistic mix of surface and
// free-space returns.
std::vector<std::vector<MeasurementTuple>> synthetic_scans(int agents, int beams,
                                                           std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SensedBody> bodies;
  std::vector<Pose2D> poses;
  for (int i = 0; i < agents; ++i) {
    bool ok = false;
    Vec2 pos;
    for (int attempt = 0; attempt < 512 && !ok; ++attempt) {
      pos = rng.in_annulus(0.0, 3.0);
      ok = true;
      for (const auto& b : bodies) {
        if (norm(b.center - pos) < 0.5) {
          ok = false;
          break;
        }
      }
    }
    const double speed = rng.uniform(0.0, 0.5);
    bodies.push_back({pos, 0.15, unit_from_angle(rng.angle()) * speed});
    poses.push_back({pos, rng.angle()});
  }

  const PlannerConfig p = bench_planner(beams);
  std::vector<std::vector<MeasurementTuple>> scans;
  scans.reserve(static_cast<size_t>(agents));
  for (int i = 0; i < agents; ++i) {
    std::vector<SensedBody> others;
    for (int j = 0; j < agents; ++j) {
      if (j != i) others.push_back(bodies[static_cast<size_t>(j)]);
    }
    scans.push_back(raycast_scan(poses[static_cast<size_t>(i)],
                                 bodies[static_cast<size_t>(i)].velocity, others, p.n_beams,
                                 p.max_range));
  }
  return scans;
}

}  // namespace

std::vector<BenchRow> run_bench(const BenchConfig& cfg, std::ostream* progress) {
  // The 1-worker cell anchors every speedup ratio, so it is always measured
  // first within a beams group.
  std::vector<int> workers_list = cfg.workers;
  std::sort(workers_list.begin(), workers_list.end());
  workers_list.erase(std::unique(workers_list.begin(), workers_list.end()), workers_list.end());
  if (workers_list.empty() || workers_list.front() != 1) {
    workers_list.insert(workers_list.begin(), 1);
  }

  std::vector<BenchRow> rows;
  for (int beams : cfg.beams) {
    const PlannerConfig planner = bench_planner(beams);
    const auto scans = synthetic_scans(cfg.agents, beams, cfg.seed);

    // Reference outputs for the bitwise serial/parallel equality gate.
    std::vector<PlannerFunction> reference;
    reference.reserve(scans.size());
    for (const auto& scan : scans) reference.push_back(build_planner_function(scan, planner, 1));

    double one_worker_mean = 0.0;
    for (int workers : workers_list) {
      for (size_t i = 0; i < scans.size(); ++i) {
        const PlannerFunction built = build_planner_function(scans[i], planner, workers);
        if (built.radii != reference[i].radii || built.bearings != reference[i].bearings) {
          throw std::runtime_error("bench: parallel planner output differs from serial at " +
                                   std::to_string(beams) + " beams, " +
                                   std::to_string(workers) + " workers");
        }
      }

      std::vector<double> iter_ms;
      std::vector<double> agent_ms;
      const auto total_start = std::chrono::steady_clock::now();
      for (int rep = 0; rep < cfg.reps; ++rep) {
        double iter = 0.0;
        for (const auto& scan : scans) {
          const auto t0 = std::chrono::steady_clock::now();
          const PlannerFunction built = build_planner_function(scan, planner, workers);
          const double ms =
              std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                  .count();
          // Keep the optimizer honest about the unused build.
          if (built.radii.empty()) throw std::runtime_error("bench: empty planner function");
          iter += ms;
          agent_ms.push_back(ms);
        }
        iter_ms.push_back(iter);
      }
      const double total_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - total_start).count();

      BenchRow row;
      row.beams = beams;
      row.agents = cfg.agents;
      row.workers = workers;
      row.total_s = total_s;
      row.iter_mean_ms = std::accumulate(iter_ms.begin(), iter_ms.end(), 0.0) /
                         static_cast<double>(iter_ms.size());
      row.iter_p50_ms = percentile(iter_ms, 50.0);
      row.iter_p95_ms = percentile(iter_ms, 95.0);
      row.agent_mean_ms = std::accumulate(agent_ms.begin(), agent_ms.end(), 0.0) /
                          static_cast<double>(agent_ms.size());
      row.agent_p50_ms = percentile(agent_ms, 50.0);
      row.agent_p95_ms = percentile(agent_ms, 95.0);
      if (workers == 1) one_worker_mean = row.iter_mean_ms;
      row.speedup = (workers == 1 || one_worker_mean <= 0.0)
                        ? 1.0
                        : one_worker_mean / row.iter_mean_ms;
      rows.push_back(row);

      if (progress != nullptr) {
        *progress << "bench: beams=" << beams << " workers=" << workers
                  << " iter_mean_ms=" << row.iter_mean_ms << " speedup=" << row.speedup
                  << "\n";
      }
    }
  }
  return rows;
}

void write_bench_csv(std::span<const BenchRow> rows, std::ostream& out) {
  out << "n_beams,n_agents,workers,total_s,iter_mean_ms,iter_p50_ms,iter_p95_ms,"
         "agent_mean_ms,agent_p50_ms,agent_p95_ms,speedup\n";
  for (const auto& r : rows) {
    out << r.beams << ',' << r.agents << ',' << r.workers << ',' << format_double(r.total_s)
        << ',' << format_double(r.iter_mean_ms) << ',' << format_double(r.iter_p50_ms) << ','
        << format_double(r.iter_p95_ms) << ',' << format_double(r.agent_mean_ms) << ','
        << format_double(r.agent_p50_ms) << ',' << format_double(r.agent_p95_ms) << ','
        << format_double(r.speedup) << '\n';
  }
}

}  // namespace invnav
