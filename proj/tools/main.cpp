#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "invnav/bench.hpp"
#include "invnav/metrics.hpp"
#include "invnav/scenario.hpp"
#include "invnav/simulator.hpp"
#include "invnav/svg.hpp"
#include "invnav/trajectory_log.hpp"
#include "invnav/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerification = 1;
constexpr int kExitUsage = 2;

int default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

bool write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  out << content;
  return true;
}

struct RunFlags {
  std::string scenario_path;
  std::string out_dir = "out";
  std::string mode_override;
  std::string strategy_override;
  int workers = default_workers();
  bool plot = false;
  bool timings = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int apply_overrides(invnav::ScenarioConfig& cfg, const RunFlags& flags) {
  cfg.workers = flags.workers;
  cfg.timings = flags.timings;
  if (flags.seed_set) {
    cfg.seed = flags.seed;
    // Seed participates in crowd placement, so regenerate from scratch.
  }
  if (!flags.mode_override.empty()) {
    invnav::ConstraintMode mode;
    if (!invnav::parse_constraint_mode(flags.mode_override, &mode)) {
      std::cerr << "error: unknown constraint mode '" << flags.mode_override << "'\n";
      return kExitUsage;
    }
    cfg.planner.mode = mode;
    for (auto& a : cfg.agents) a.planner.mode = mode;
  }
  if (!flags.strategy_override.empty()) {
    invnav::Strategy strategy;
    if (!invnav::parse_strategy(flags.strategy_override, &strategy)) {
      std::cerr << "error: unknown strategy '" << flags.strategy_override << "'\n";
      return kExitUsage;
    }
    for (auto& a : cfg.agents) a.strategy = strategy;
  }
  return kExitOk;
}

invnav::ScenarioConfig load_or_exit(const std::string& path) {
  return invnav::load_scenario(path);  // throws ScenarioError
}

int cmd_run(const RunFlags& flags) {
  invnav::ScenarioConfig cfg = load_or_exit(flags.scenario_path);
  if (flags.seed_set) {
    // Reload with the override before the crowd is materialized.
    std::ifstream in(flags.scenario_path);
    cfg = invnav::parse_scenario(in, cfg.name);
    cfg.seed = flags.seed;
    invnav::materialize_crowd(cfg);
  }
  const int rc = apply_overrides(cfg, flags);
  if (rc != kExitOk) return rc;

  const invnav::RunResult result = invnav::run_scenario(cfg);
  const invnav::RunMetrics metrics =
      invnav::compute_run_metrics(result.log, cfg, result.stats);

  std::filesystem::create_directories(flags.out_dir);
  const std::filesystem::path out(flags.out_dir);
  if (!write_file(out / "trace.csv", invnav::trace_csv_string(result.log))) return kExitUsage;
  if (!write_file(out / "metrics.json", invnav::metrics_json(metrics, cfg))) return kExitUsage;
  if (flags.plot) {
    std::ofstream svg(out / "trace.svg", std::ios::binary);
    invnav::render_svg(result.log, cfg, svg);
  }

  std::cout << "scenario " << cfg.name << ": "
            << (result.stats.all_converged ? "converged" : "NOT converged (timeout)")
            << ", completion_time=" << result.stats.completion_time
            << " s, min_clearance=" << result.stats.min_agent_clearance
            << " m, safety_violations=" << result.stats.safety_violations << "\n";
  std::cout << "wrote " << (out / "trace.csv").string() << ", "
            << (out / "metrics.json").string() << (flags.plot ? ", trace.svg" : "") << "\n";
  return kExitOk;
}

int cmd_compare(const RunFlags& flags) {
  invnav::ScenarioConfig cfg = load_or_exit(flags.scenario_path);
  const int rc = apply_overrides(cfg, flags);
  if (rc != kExitOk) return rc;

  invnav::ScenarioConfig proposed_cfg = cfg;
  for (auto& a : proposed_cfg.agents) a.strategy = invnav::Strategy::kInvariantSet;
  invnav::ScenarioConfig decoupled_cfg = cfg;
  for (auto& a : decoupled_cfg.agents) a.strategy = invnav::Strategy::kDecoupledBaseline;

  const invnav::RunResult proposed = invnav::run_scenario(proposed_cfg);
  const invnav::RunResult decoupled = invnav::run_scenario(decoupled_cfg);
  const invnav::RunMetrics mp =
      invnav::compute_run_metrics(proposed.log, proposed_cfg, proposed.stats);
  const invnav::RunMetrics md =
      invnav::compute_run_metrics(decoupled.log, decoupled_cfg, decoupled.stats);

  std::filesystem::create_directories(flags.out_dir);
  const std::filesystem::path out(flags.out_dir);
  {
    std::ofstream csv(out / "compare.csv", std::ios::binary);
    const auto rows = invnav::compare_rows(mp, md);
    invnav::write_compare_csv(rows, csv);
  }
  write_file(out / "trace_proposed.csv", invnav::trace_csv_string(proposed.log));
  write_file(out / "trace_decoupled.csv", invnav::trace_csv_string(decoupled.log));
  write_file(out / "metrics_proposed.json", invnav::metrics_json(mp, proposed_cfg));
  write_file(out / "metrics_decoupled.json", invnav::metrics_json(md, decoupled_cfg));
  if (flags.plot) {
    std::ofstream svg_p(out / "trace_proposed.svg", std::ios::binary);
    invnav::render_svg(proposed.log, proposed_cfg, svg_p);
    std::ofstream svg_d(out / "trace_decoupled.svg", std::ios::binary);
    invnav::render_svg(decoupled.log, decoupled_cfg, svg_d);
  }

  std::printf("%-8s %14s %14s %14s %14s\n", "agent", "len_decoupled", "len_proposed",
              "curv_decoupled", "curv_proposed");
  for (const auto& row : invnav::compare_rows(mp, md)) {
    std::printf("%-8d %14.3f %14.3f %14.3f %14.3f\n", row.agent, row.path_len_decoupled,
                row.path_len_proposed, row.curvature_decoupled, row.curvature_proposed);
  }
  std::cout << "wrote " << (out / "compare.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invnav: invariant-disc self-navigation engine"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run a scenario and write trace/metrics");
  run->add_option("scenario", run_flags.scenario_path, "scenario config file")->required();
  run->add_option("-o,--out", run_flags.out_dir, "output directory");
  run->add_flag("--plot", run_flags.plot, "also render trace.svg");
  run->add_option("--mode", run_flags.mode_override,
                  "constraint mode override (nominal|worst_both|known_speed|known_dir)");
  run->add_option("--strategy", run_flags.strategy_override,
                  "strategy override for all agents (invariant_set|decoupled)");
  run->add_option("--workers", run_flags.workers, "planner worker threads");
  run->add_flag("--timings", run_flags.timings,
                "record planning wall-clock (output bytes become machine-dependent)");
  run->add_option("--seed", run_flags.seed, "seed override")
      ->each([&run_flags](const std::string&) { run_flags.seed_set = true; });

  RunFlags compare_flags;
  CLI::App* compare =
      app.add_subcommand("compare", "paired proposed-vs-decoupled runs of one scenario");
  compare->add_option("scenario", compare_flags.scenario_path, "scenario config file")
      ->required();
  compare->add_option("-o,--out", compare_flags.out_dir, "output directory");
  compare->add_flag("--plot", compare_flags.plot, "also render SVG traces");
  compare->add_option("--workers", compare_flags.workers, "planner worker threads");

  invnav::BenchConfig bench_cfg;
  std::string bench_out = "bench.csv";
  CLI::App* bench = app.add_subcommand("bench", "parallel planner-construction benchmark");
  bench->add_option("--beams", bench_cfg.beams, "beam counts")->delimiter(',');
  bench->add_option("--workers", bench_cfg.workers, "worker counts")->delimiter(',');
  bench->add_option("--agents", bench_cfg.agents, "synthetic agents");
  bench->add_option("--reps", bench_cfg.reps, "repetitions per cell");
  bench->add_option("--seed", bench_cfg.seed, "scene seed");
  bench->add_option("-o,--out", bench_out, "output CSV path");

  invnav::VerifyOptions verify_opt;
  CLI::App* verify = app.add_subcommand("verify", "run the oracle cross-check suite");
  verify->add_option("--seeds", verify_opt.seeds, "number of independent randomized suites");
  verify->add_flag("--quick", verify_opt.quick, "reduced sample counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (compare->parsed()) return cmd_compare(compare_flags);
    if (bench->parsed()) {
      const auto rows = invnav::run_bench(bench_cfg, &std::cout);
      std::ofstream out(bench_out, std::ios::binary);
      if (!out) {
        std::cerr << "error: cannot write " << bench_out << "\n";
        return kExitUsage;
      }
      invnav::write_bench_csv(rows, out);
      std::cout << "wrote " << bench_out << "\n";
      return kExitOk;
    }
    if (verify->parsed()) {
      const invnav::VerifyReport report = invnav::run_verification(verify_opt);
      std::printf("%-34s %-6s %s\n", "check", "result", "detail");
      for (const auto& c : report.checks) {
        std::printf("%-34s %-6s %s\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                    c.detail.c_str());
      }
      return report.all_pass() ? kExitOk : kExitVerification;
    }
  } catch (const invnav::ScenarioError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  }
  return kExitUsage;
}
