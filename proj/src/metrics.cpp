#include "invnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>

#include "json.hpp"

namespace invnav {

double path_length(std::span<const Vec2> trace) {
  double total = 0.0;
  for (size_t i = 1; i < trace.size(); ++i) total += norm(trace[i] - trace[i - 1]);
  return total;
}

std::vector<Vec2> resample_arc_length(std::span<const Vec2> trace, double spacing) {
  std::vector<Vec2> out;
  if (trace.empty() || spacing <= 0.0) return out;

  std::vector<double> cum(trace.size(), 0.0);
  for (size_t i = 1; i < trace.size(); ++i) {
    cum[i] = cum[i - 1] + norm(trace[i] - trace[i - 1]);
  }
  const double total = cum.back();
  const size_t samples = static_cast<size_t>(std::floor(total / spacing)) + 1;

  out.reserve(samples);
  size_t seg = 0;
  for (size_t k = 0; k < samples; ++k) {
    const double s = static_cast<double>(k) * spacing;
    while (seg + 1 < trace.size() && cum[seg + 1] < s) ++seg;
    if (seg + 1 >= trace.size()) {
      out.push_back(trace.back());
      continue;
    }
    const double seg_len = cum[seg + 1] - cum[seg];
    const double frac = seg_len > 0.0 ? (s - cum[seg]) / seg_len : 0.0;
    out.push_back(trace[seg] + (trace[seg + 1] - trace[seg]) * frac);
  }
  return out;
}

double menger_curvature(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
  const double a = norm(p1 - p0);
  const double b = norm(p2 - p1);
  const double c = norm(p2 - p0);
  if (a < 1e-12 || b < 1e-12 || c < 1e-12) return 0.0;
  const double doubled_area = std::fabs(cross(p1 - p0, p2 - p0));
  return 2.0 * doubled_area / (a * b * c);
}

double avg_curvature(std::span<const Vec2> trace, double spacing) {
  const std::vector<Vec2> pts = resample_arc_length(trace, spacing);
  if (pts.size() < 3) return 0.0;
  double sum = 0.0;
  long count = 0;
  for (size_t i = 1; i + 1 < pts.size(); ++i) {
    const Vec2& p0 = pts[i - 1];
    const Vec2& p1 = pts[i];
    const Vec2& p2 = pts[i + 1];
    const double a = norm(p1 - p0);
    const double b = norm(p2 - p1);
    const double c = norm(p2 - p0);
    if (a < 1e-12 || b < 1e-12 || c < 1e-12) continue;  // duplicate points
    const double doubled_area = std::fabs(cross(p1 - p0, p2 - p0));
    if (doubled_area == 0.0) continue;  // exactly collinear
    sum += 2.0 * doubled_area / (a * b * c);
    ++count;
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double rank = std::ceil(p / 100.0 * static_cast<double>(values.size()));
  const long idx = std::clamp<long>(static_cast<long>(rank) - 1, 0,
                                    static_cast<long>(values.size()) - 1);
  return values[static_cast<size_t>(idx)];
}

std::vector<std::pair<int, std::vector<Vec2>>> agent_traces(const TrajectoryLog& log) {
  std::map<int, std::vector<Vec2>> by_agent;
  for (const auto& r : log.rows) by_agent[r.agent].push_back({r.x, r.y});
  return {by_agent.begin(), by_agent.end()};
}

RunMetrics compute_run_metrics(const TrajectoryLog& log, const ScenarioConfig& cfg,
                               const RunStats& stats) {
  RunMetrics m;
  m.all_converged = stats.all_converged;
  m.completion_time = stats.completion_time;
  m.min_agent_clearance = stats.min_agent_clearance;
  m.min_obstacle_clearance = stats.min_obstacle_clearance;
  m.safety_violations = stats.safety_violations;
  m.invariance_violations = stats.invariance_violations;

  std::map<int, const AgentSpec*> specs;
  for (const auto& a : cfg.agents) specs[a.id] = &a;
  std::map<int, const AgentOutcome*> outcomes;
  for (const auto& o : stats.agents) outcomes[o.id] = &o;

  for (const auto& [id, trace] : agent_traces(log)) {
    AgentMetrics am;
    am.id = id;
    am.path_length = path_length(trace);
    am.avg_curvature = avg_curvature(trace);
    if (auto it = specs.find(id); it != specs.end()) {
      am.straight_line = norm(it->second->start.position - it->second->target);
    }
    if (auto it = outcomes.find(id); it != outcomes.end()) {
      am.converged = it->second->converged;
      am.time_to_target = it->second->time_to_target;
    }
    m.agents.push_back(am);
  }

  if (!stats.plan_ms.empty()) {
    m.plan_timing.available = true;
    m.plan_timing.mean_ms = std::accumulate(stats.plan_ms.begin(), stats.plan_ms.end(), 0.0) /
                            static_cast<double>(stats.plan_ms.size());
    m.plan_timing.p50_ms = percentile(stats.plan_ms, 50.0);
    m.plan_timing.p95_ms = percentile(stats.plan_ms, 95.0);
  }
  return m;
}

std::string metrics_json(const RunMetrics& m, const ScenarioConfig& cfg) {
  nlohmann::ordered_json j;
  j["scenario"] = cfg.name;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["constraint_mode"] = to_string(cfg.planner.mode);
  j["n_agents"] = cfg.agents.size();
  j["timeout_s"] = cfg.timeout;
  j["convergence_delta_m"] = cfg.delta;
  j["all_converged"] = m.all_converged;
  j["completion_time_s"] = m.completion_time;
  j["min_agent_clearance_m"] = m.min_agent_clearance;
  if (std::isfinite(m.min_obstacle_clearance)) {
    j["min_obstacle_clearance_m"] = m.min_obstacle_clearance;
  }
  j["one_period_safety_violations"] = m.safety_violations;
  j["invariance_violations"] = m.invariance_violations;

  nlohmann::ordered_json agents = nlohmann::ordered_json::array();
  for (const auto& a : m.agents) {
    nlohmann::ordered_json ja;
    ja["id"] = a.id;
    ja["converged"] = a.converged;
    ja["time_to_target_s"] = a.time_to_target;
    ja["path_length_m"] = a.path_length;
    ja["avg_curvature_per_m"] = a.avg_curvature;
    ja["straight_line_m"] = a.straight_line;
    agents.push_back(ja);
  }
  j["agents"] = agents;

  if (m.plan_timing.available) {
    j["plan_timing_ms"] = {{"mean", m.plan_timing.mean_ms},
                           {"p50", m.plan_timing.p50_ms},
                           {"p95", m.plan_timing.p95_ms}};
  }
  return j.dump(2) + "\n";
}

std::vector<CompareRow> compare_rows(const RunMetrics& proposed, const RunMetrics& decoupled) {
  std::map<int, const AgentMetrics*> dec;
  for (const auto& a : decoupled.agents) dec[a.id] = &a;
  std::vector<CompareRow> rows;
  for (const auto& a : proposed.agents) {
    auto it = dec.find(a.id);
    if (it == dec.end()) continue;
    CompareRow r;
    r.agent = a.id;
    r.path_len_proposed = a.path_length;
    r.curvature_proposed = a.avg_curvature;
    r.path_len_decoupled = it->second->path_length;
    r.curvature_decoupled = it->second->avg_curvature;
    rows.push_back(r);
  }
  return rows;
}

void write_compare_csv(std::span<const CompareRow> rows, std::ostream& out) {
  out << "agent,path_len_decoupled,path_len_proposed,path_len_diff,"
         "avg_curvature_decoupled,avg_curvature_proposed\n";
  for (const auto& r : rows) {
    out << r.agent << ',' << format_double(r.path_len_decoupled) << ','
        << format_double(r.path_len_proposed) << ','
        << format_double(r.path_len_proposed - r.path_len_decoupled) << ','
        << format_double(r.curvature_decoupled) << ',' << format_double(r.curvature_proposed)
        << '\n';
  }
}

}  // namespace invnav
