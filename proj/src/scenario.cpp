#include "invnav/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "invnav/rng.hpp"

namespace invnav {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& s) {
  bool in_quote = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_quote = !in_quote;
    if (s[i] == '#' && !in_quote) return s.substr(0, i);
  }
  return s;
}

struct Value {
  enum Kind { kNumber, kString, kBool, kArray };
  Kind kind = kNumber;
  double num = 0.0;
  std::string str;
  bool boolean = false;
  std::vector<Value> items;
};

Value parse_value(const std::string& raw, int line);

std::vector<std::string> split_top_level(const std::string& body, int line) {
  std::vector<std::string> parts;
  int depth = 0;
  bool in_quote = false;
  std::string cur;
  for (char ch : body) {
    if (ch == '"') in_quote = !in_quote;
    if (!in_quote) {
      if (ch == '[') ++depth;
      if (ch == ']') --depth;
      if (depth < 0) throw ScenarioError(line, "unbalanced ']' in array");
      if (ch == ',' && depth == 0) {
        parts.push_back(cur);
        cur.clear();
        continue;
      }
    }
    cur += ch;
  }
  if (depth != 0 || in_quote) throw ScenarioError(line, "unterminated array or string");
  if (!trim(cur).empty() || !parts.empty()) parts.push_back(cur);
  return parts;
}

Value parse_value(const std::string& raw, int line) {
  const std::string text = trim(raw);
  if (text.empty()) throw ScenarioError(line, "missing value");
  Value v;
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"')
      throw ScenarioError(line, "unterminated string");
    v.kind = Value::kString;
    v.str = text.substr(1, text.size() - 2);
    return v;
  }
  if (text == "true" || text == "false") {
    v.kind = Value::kBool;
    v.boolean = (text == "true");
    return v;
  }
  if (text.front() == '[') {
    if (text.back() != ']') throw ScenarioError(line, "unterminated array");
    v.kind = Value::kArray;
    for (const auto& part : split_top_level(text.substr(1, text.size() - 2), line)) {
      const std::string t = trim(part);
      if (t.empty()) throw ScenarioError(line, "empty array element");
      v.items.push_back(parse_value(t, line));
    }
    return v;
  }
  char* end = nullptr;
  v.num = std::strtod(text.c_str(), &end);
  if (end == nullptr || *end != '\0')
    throw ScenarioError(line, "cannot parse value '" + text + "'");
  v.kind = Value::kNumber;
  return v;
}

double as_number(const Value& v, int line) {
  if (v.kind != Value::kNumber) throw ScenarioError(line, "expected a number");
  return v.num;
}

std::string as_string(const Value& v, int line) {
  if (v.kind != Value::kString) throw ScenarioError(line, "expected a quoted string");
  return v.str;
}

std::vector<double> as_number_array(const Value& v, int line, size_t expected) {
  if (v.kind != Value::kArray) throw ScenarioError(line, "expected an array");
  if (expected != 0 && v.items.size() != expected) {
    throw ScenarioError(line, "expected an array of " + std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  out.reserve(v.items.size());
  for (const auto& item : v.items) out.push_back(as_number(item, line));
  return out;
}

int as_int(const Value& v, int line) {
  const double n = as_number(v, line);
  if (n != std::floor(n)) throw ScenarioError(line, "expected an integer");
  return static_cast<int>(n);
}

}  // namespace

ScenarioError::ScenarioError(int line_number, const std::string& message)
    : std::runtime_error(line_number > 0 ? "line " + std::to_string(line_number) + ": " + message
                                         : message),
      line(line_number) {}

const char* to_string(Strategy s) {
  return s == Strategy::kInvariantSet ? "invariant_set" : "decoupled";
}

bool parse_strategy(const std::string& text, Strategy* out) {
  if (text == "invariant_set") *out = Strategy::kInvariantSet;
  else if (text == "decoupled") *out = Strategy::kDecoupledBaseline;
  else return false;
  return true;
}

Vec2 ObstacleScript::position(double t) const {
  if (waypoints.empty()) return {0.0, 0.0};
  if (t <= waypoints.front()[0]) return {waypoints.front()[1], waypoints.front()[2]};
  for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const auto& a = waypoints[i];
    const auto& b = waypoints[i + 1];
    if (t < b[0]) {
      const double span = b[0] - a[0];
      const double s = span > 0.0 ? (t - a[0]) / span : 1.0;
      return {a[1] + s * (b[1] - a[1]), a[2] + s * (b[2] - a[2])};
    }
  }
  return {waypoints.back()[1], waypoints.back()[2]};
}

Vec2 ObstacleScript::velocity(double t) const {
  if (waypoints.size() < 2) return {0.0, 0.0};
  if (t < waypoints.front()[0] || t >= waypoints.back()[0]) return {0.0, 0.0};
  for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
    const auto& a = waypoints[i];
    const auto& b = waypoints[i + 1];
    if (t < b[0]) {
      const double span = b[0] - a[0];
      if (span <= 0.0) return {0.0, 0.0};
      return {(b[1] - a[1]) / span, (b[2] - a[2]) / span};
    }
  }
  return {0.0, 0.0};
}

namespace {

struct AgentDraft {
  AgentSpec spec;
  bool has_start = false;
  bool has_target = false;
  int line = 0;
};

void validate(const ScenarioConfig& cfg) {
  if (cfg.agents.empty()) throw ScenarioError(0, "scenario defines no agents");
  if (cfg.dt <= 0.0) throw ScenarioError(0, "dt must be positive");
  if (cfg.timeout <= 0.0) throw ScenarioError(0, "timeout must be positive");
  if (cfg.delta <= 0.0) throw ScenarioError(0, "convergence delta must be positive");

  std::vector<int> ids;
  for (const auto& a : cfg.agents) {
    ids.push_back(a.id);
    if (a.radius <= 0.0) throw ScenarioError(0, "agent radius must be positive");
    if (norm(a.start.position - a.target) < 1e-9)
      throw ScenarioError(0, "agent start coincides with its target");
    if (a.gains.k1 <= 0.0 || a.gains.k2 <= 0.0)
      throw ScenarioError(0, "control gains must be positive");
    const auto& p = a.planner;
    if (p.n_beams < 8) throw ScenarioError(0, "n_beams must be at least 8");
    if (p.plan_hz <= 0.0) throw ScenarioError(0, "f_p must be positive");
    if (p.max_range <= 0.0) throw ScenarioError(0, "d_max must be positive");
    if (p.epsilon <= 0.0 || p.epsilon > 0.01 * p.max_range)
      throw ScenarioError(0, "epsilon must be positive and small against d_max");
    if (p.v_max < 0.0) throw ScenarioError(0, "v_max must be non-negative");
    if (p.inflation < 0.0) throw ScenarioError(0, "inflation must be non-negative");
    if (cfg.dt > 0.1 / p.plan_hz)
      throw ScenarioError(0, "dt must be at most one tenth of the planning period");
    if (cfg.omega_max > 0.0 && omega_bound(a.gains) > cfg.omega_max + 1e-12)
      throw ScenarioError(0, "gains exceed the platform angular-rate limit");
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw ScenarioError(0, "duplicate agent id");

  for (const auto& o : cfg.obstacles) {
    if (o.radius <= 0.0) throw ScenarioError(0, "obstacle radius must be positive");
    for (size_t i = 0; i + 1 < o.waypoints.size(); ++i) {
      if (o.waypoints[i + 1][0] < o.waypoints[i][0])
        throw ScenarioError(0, "obstacle script times must be non-decreasing");
    }
  }
}

}  // namespace

ScenarioConfig parse_scenario(std::istream& in, const std::string& name) {
  ScenarioConfig cfg;
  cfg.name = name;

  enum class Section { kNone, kWorld, kPlanner, kController, kBaseline, kCrowd, kAgent, kObstacle };
  Section section = Section::kNone;
  std::vector<AgentDraft> drafts;
  CrowdSpec crowd;
  bool has_crowd = false;

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(strip_comment(raw));
    if (text.empty()) continue;

    if (text.front() == '[') {
      if (text.size() >= 4 && text[1] == '[') {
        if (text.substr(text.size() - 2) != "]]")
          throw ScenarioError(line, "malformed table header");
        const std::string tname = trim(text.substr(2, text.size() - 4));
        if (tname == "agents") {
          drafts.emplace_back();
          drafts.back().line = line;
          drafts.back().spec.id = static_cast<int>(drafts.size()) - 1;
          section = Section::kAgent;
        } else if (tname == "obstacles") {
          cfg.obstacles.emplace_back();
          cfg.obstacles.back().waypoints.clear();
          section = Section::kObstacle;
        } else {
          throw ScenarioError(line, "unknown table '" + tname + "'");
        }
        continue;
      }
      if (text.back() != ']') throw ScenarioError(line, "malformed section header");
      const std::string sname = trim(text.substr(1, text.size() - 2));
      if (sname == "world") section = Section::kWorld;
      else if (sname == "planner") section = Section::kPlanner;
      else if (sname == "controller") section = Section::kController;
      else if (sname == "baseline") section = Section::kBaseline;
      else if (sname == "crowd") { section = Section::kCrowd; has_crowd = true; }
      else throw ScenarioError(line, "unknown section '" + sname + "'");
      continue;
    }

    const size_t eq = text.find('=');
    if (eq == std::string::npos) throw ScenarioError(line, "expected 'key = value'");
    const std::string key = trim(text.substr(0, eq));
    const Value value = parse_value(text.substr(eq + 1), line);

    switch (section) {
      case Section::kWorld:
        if (key == "dt") cfg.dt = as_number(value, line);
        else if (key == "timeout") cfg.timeout = as_number(value, line);
        else if (key == "convergence_delta") cfg.delta = as_number(value, line);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_number(value, line));
        else if (key == "name") cfg.name = as_string(value, line);
        else throw ScenarioError(line, "unknown key '" + key + "' in [world]");
        break;
      case Section::kPlanner:
        if (key == "n_beams") cfg.planner.n_beams = as_int(value, line);
        else if (key == "f_p") cfg.planner.plan_hz = as_number(value, line);
        else if (key == "d_max") cfg.planner.max_range = as_number(value, line);
        else if (key == "epsilon") cfg.planner.epsilon = as_number(value, line);
        else if (key == "v_max") cfg.planner.v_max = as_number(value, line);
        else if (key == "inflation") cfg.planner.inflation = as_number(value, line);
        else if (key == "mode") {
          if (!parse_constraint_mode(as_string(value, line), &cfg.planner.mode))
            throw ScenarioError(line, "unknown constraint mode");
        } else throw ScenarioError(line, "unknown key '" + key + "' in [planner]");
        break;
      case Section::kController:
        if (key == "k1") cfg.gains.k1 = as_number(value, line);
        else if (key == "k2") cfg.gains.k2 = as_number(value, line);
        else if (key == "omega_max") cfg.omega_max = as_number(value, line);
        else throw ScenarioError(line, "unknown key '" + key + "' in [controller]");
        break;
      case Section::kBaseline:
        if (key == "safety_distance") cfg.baseline.safety_distance = as_number(value, line);
        else if (key == "cone_half_angle") cfg.baseline.cone_half_angle = as_number(value, line);
        else if (key == "lookahead") cfg.baseline.lookahead = as_number(value, line);
        else if (key == "v_cruise") cfg.baseline.v_cruise = as_number(value, line);
        else if (key == "k_heading") cfg.baseline.k_heading = as_number(value, line);
        else if (key == "turn_rate") cfg.baseline.turn_rate = as_number(value, line);
        else if (key == "stop_distance") cfg.baseline.stop_distance = as_number(value, line);
        else throw ScenarioError(line, "unknown key '" + key + "' in [baseline]");
        break;
      case Section::kCrowd:
        if (key == "n_agents") crowd.n_agents = as_int(value, line);
        else if (key == "arena_radius") crowd.arena_radius = as_number(value, line);
        else if (key == "min_separation") crowd.min_separation = as_number(value, line);
        else if (key == "min_travel") crowd.min_travel = as_number(value, line);
        else if (key == "pattern") {
          const std::string p = as_string(value, line);
          if (p == "scatter") crowd.pattern = CrowdPattern::kScatter;
          else if (p == "ring") crowd.pattern = CrowdPattern::kRing;
          else throw ScenarioError(line, "unknown crowd pattern '" + p + "'");
        } else throw ScenarioError(line, "unknown key '" + key + "' in [crowd]");
        break;
      case Section::kAgent: {
        AgentDraft& d = drafts.back();
        if (key == "id") d.spec.id = as_int(value, line);
        else if (key == "radius") d.spec.radius = as_number(value, line);
        else if (key == "start") {
          const auto v = as_number_array(value, line, 3);
          d.spec.start = {{v[0], v[1]}, wrap_angle(v[2])};
          d.has_start = true;
        } else if (key == "target") {
          const auto v = as_number_array(value, line, 2);
          d.spec.target = {v[0], v[1]};
          d.has_target = true;
        } else if (key == "strategy") {
          if (!parse_strategy(as_string(value, line), &d.spec.strategy))
            throw ScenarioError(line, "unknown strategy");
        } else throw ScenarioError(line, "unknown key '" + key + "' in [[agents]]");
        break;
      }
      case Section::kObstacle: {
        ObstacleScript& o = cfg.obstacles.back();
        if (key == "radius") o.radius = as_number(value, line);
        else if (key == "path") {
          if (value.kind != Value::kArray) throw ScenarioError(line, "path must be an array");
          for (const auto& item : value.items) {
            const auto v = as_number_array(item, line, 3);
            o.waypoints.push_back({v[0], v[1], v[2]});
          }
        } else throw ScenarioError(line, "unknown key '" + key + "' in [[obstacles]]");
        break;
      }
      case Section::kNone:
        throw ScenarioError(line, "key outside of any section");
    }
  }

  for (auto& d : drafts) {
    if (!d.has_start) throw ScenarioError(d.line, "agent missing 'start'");
    if (!d.has_target) throw ScenarioError(d.line, "agent missing 'target'");
    cfg.agents.push_back(d.spec);
  }
  if (has_crowd) cfg.crowd = crowd;

  // Global sections apply to every agent.
  for (auto& a : cfg.agents) {
    a.gains = cfg.gains;
    a.planner = cfg.planner;
    a.baseline = cfg.baseline;
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(0, "cannot open scenario file '" + path + "'");
  std::string name = path;
  const size_t slash = name.find_last_of('/');
  if (slash != std::string::npos) name = name.substr(slash + 1);
  const size_t dot = name.find_last_of('.');
  if (dot != std::string::npos) name = name.substr(0, dot);
  ScenarioConfig cfg = parse_scenario(in, name);
  materialize_crowd(cfg);
  validate(cfg);
  return cfg;
}

void materialize_crowd(ScenarioConfig& cfg) {
  if (!cfg.crowd.has_value()) return;
  const CrowdSpec c = *cfg.crowd;
  cfg.crowd.reset();
  if (c.n_agents <= 0) return;

  Rng rng(cfg.seed * 0x9e3779b97f4a7c15ull + 0x5eedull);
  auto sample_point = [&]() {
    const double r = c.arena_radius * std::sqrt(rng.u01());
    return unit_from_angle(rng.angle()) * r;
  };
  auto well_separated = [&](const Vec2& p, const std::vector<Vec2>& pts) {
    for (const auto& q : pts) {
      if (norm(p - q) < c.min_separation) return false;
    }
    return true;
  };

  std::vector<Vec2> starts;
  std::vector<Vec2> targets;
  if (c.pattern == CrowdPattern::kScatter) {
    for (int i = 0; i < c.n_agents; ++i) {
      bool placed = false;
      for (int attempt = 0; attempt < 20000 && !placed; ++attempt) {
        const Vec2 s = sample_point();
        if (!well_separated(s, starts)) continue;
        const Vec2 t = sample_point();
        if (!well_separated(t, targets)) continue;
        if (norm(t - s) < c.min_travel) continue;
        starts.push_back(s);
        targets.push_back(t);
        placed = true;
      }
      if (!placed) {
        throw ScenarioError(0, "crowd placement failed; relax separation or enlarge the arena");
      }
    }
  } else {
    bool placed = false;
    for (int attempt = 0; attempt < 256 && !placed; ++attempt) {
      starts.clear();
      targets.clear();
      for (int i = 0; i < c.n_agents; ++i) {
        const double ang = 2.0 * kPi * i / c.n_agents + rng.uniform(-0.2, 0.2);
        const double rad = c.arena_radius + rng.uniform(-0.25, 0.25);
        const Vec2 s = unit_from_angle(ang) * rad;
        starts.push_back(s);
        targets.push_back(-s + Vec2{rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3)});
      }
      placed = true;
      for (size_t i = 0; i < starts.size() && placed; ++i) {
        for (size_t j = i + 1; j < starts.size() && placed; ++j) {
          if (norm(starts[i] - starts[j]) < c.min_separation ||
              norm(targets[i] - targets[j]) < c.min_separation) {
            placed = false;
          }
        }
      }
    }
    if (!placed) {
      throw ScenarioError(0, "ring placement failed; relax separation or enlarge the ring");
    }
  }

  int next_id = 0;
  for (const auto& a : cfg.agents) next_id = std::max(next_id, a.id + 1);
  for (int i = 0; i < c.n_agents; ++i) {
    AgentSpec spec;
    spec.id = next_id + i;
    spec.start = {starts[static_cast<size_t>(i)], rng.angle()};
    spec.target = targets[static_cast<size_t>(i)];
    spec.gains = cfg.gains;
    spec.planner = cfg.planner;
    spec.baseline = cfg.baseline;
    cfg.agents.push_back(spec);
  }
}

namespace {
ScenarioConfig crowd_scenario_base(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.seed = seed;
  cfg.dt = 1e-3;
  cfg.timeout = 120.0;
  cfg.delta = 0.05;
  cfg.gains = {0.2, 1.0};
  cfg.planner.n_beams = 64;
  cfg.planner.plan_hz = 10.0;
  cfg.planner.max_range = 4.0;
  cfg.planner.epsilon = 1e-3;
  cfg.planner.v_max = 0.25;
  cfg.planner.inflation = 0.12;
  return cfg;
}
}  // namespace

ScenarioConfig make_crowd_scenario(int n_agents, std::uint64_t seed, Strategy strategy) {
  ScenarioConfig cfg = crowd_scenario_base(seed);
  cfg.name = "crowd_" + std::to_string(n_agents) + "_s" + std::to_string(seed);

  CrowdSpec crowd;
  crowd.n_agents = n_agents;
  crowd.arena_radius = 3.0;
  cfg.crowd = crowd;
  materialize_crowd(cfg);
  for (auto& a : cfg.agents) {
    a.radius = 0.08;
    a.strategy = strategy;
  }
  return cfg;
}

ScenarioConfig make_ring_scenario(int n_agents, std::uint64_t seed, Strategy strategy) {
  ScenarioConfig cfg = crowd_scenario_base(seed);
  cfg.name = "ring_" + std::to_string(n_agents) + "_s" + std::to_string(seed);

  CrowdSpec crowd;
  crowd.pattern = CrowdPattern::kRing;
  crowd.n_agents = n_agents;
  crowd.arena_radius = 2.2;
  cfg.crowd = crowd;
  materialize_crowd(cfg);
  for (auto& a : cfg.agents) {
    a.radius = 0.08;
    a.strategy = strategy;
  }
  return cfg;
}

}  // namespace invnav
