#include "invnav/svg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "invnav/metrics.hpp"

namespace invnav {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                          "#17becf", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

void render_svg(const TrajectoryLog& log, const ScenarioConfig& cfg, std::ostream& out,
                const SvgOptions& options) {
  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  bool first = true;
  auto grow = [&](double x, double y, double pad) {
    if (first) {
      min_x = x - pad;
      max_x = x + pad;
      min_y = y - pad;
      max_y = y + pad;
      first = false;
      return;
    }
    min_x = std::min(min_x, x - pad);
    max_x = std::max(max_x, x + pad);
    min_y = std::min(min_y, y - pad);
    max_y = std::max(max_y, y + pad);
  };
  for (const auto& r : log.rows) {
    grow(r.x, r.y, 0.2);
    if (r.disc_r > 0.0) grow(r.wx, r.wy, r.disc_r);
  }
  for (const auto& a : cfg.agents) {
    grow(a.start.position.x, a.start.position.y, 0.3);
    grow(a.target.x, a.target.y, 0.3);
  }
  for (const auto& o : cfg.obstacles) {
    for (const auto& w : o.waypoints) grow(w[1], w[2], o.radius + 0.2);
  }
  if (first) grow(0.0, 0.0, 1.0);

  const double span_x = max_x - min_x;
  const double span_y = max_y - min_y;
  const double scale = options.width_px / std::max(span_x, 1e-6);
  const int height_px = static_cast<int>(std::ceil(span_y * scale));
  auto px = [&](double x) { return (x - min_x) * scale; };
  auto py = [&](double y) { return (max_y - y) * scale; };  // y up

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width_px
      << "\" height=\"" << height_px << "\" viewBox=\"0 0 " << options.width_px << ' '
      << height_px << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Scripted obstacles: swept positions, light gray.
  for (const auto& o : cfg.obstacles) {
    if (o.waypoints.empty()) continue;
    const double t0 = o.waypoints.front()[0];
    const double t1 = o.waypoints.back()[0];
    const int steps = 12;
    for (int k = 0; k <= steps; ++k) {
      const Vec2 p = o.position(t0 + (t1 - t0) * k / steps);
      out << "<circle cx=\"" << fmt(px(p.x)) << "\" cy=\"" << fmt(py(p.y)) << "\" r=\""
          << fmt(o.radius * scale) << "\" fill=\"#bbbbbb\" fill-opacity=\"0.25\"/>\n";
    }
  }

  std::map<int, std::vector<const LogRow*>> by_agent;
  for (const auto& r : log.rows) by_agent[r.agent].push_back(&r);

  size_t color_idx = 0;
  for (const auto& [id, rows] : by_agent) {
    const char* color = kPalette[color_idx % (sizeof(kPalette) / sizeof(kPalette[0]))];
    ++color_idx;

    if (options.disc_stride > 0) {
      int k = 0;
      for (const auto* r : rows) {
        if (r->disc_r <= 0.0) continue;
        if (k++ % options.disc_stride != 0) continue;
        out << "<circle cx=\"" << fmt(px(r->wx)) << "\" cy=\"" << fmt(py(r->wy)) << "\" r=\""
            << fmt(r->disc_r * scale) << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-opacity=\"0.18\" stroke-width=\"1\"/>\n";
      }
    }

    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto* r : rows) out << fmt(px(r->x)) << ',' << fmt(py(r->y)) << ' ';
    out << "\"/>\n";
  }

  // Start and target markers.
  color_idx = 0;
  for (const auto& a : cfg.agents) {
    const char* color = kPalette[color_idx % (sizeof(kPalette) / sizeof(kPalette[0]))];
    ++color_idx;
    out << "<circle cx=\"" << fmt(px(a.start.position.x)) << "\" cy=\""
        << fmt(py(a.start.position.y)) << "\" r=\"4\" fill=\"" << color << "\"/>\n";
    const double tx = px(a.target.x);
    const double ty = py(a.target.y);
    out << "<path d=\"M " << fmt(tx - 5) << ' ' << fmt(ty - 5) << " L " << fmt(tx + 5) << ' '
        << fmt(ty + 5) << " M " << fmt(tx - 5) << ' ' << fmt(ty + 5) << " L " << fmt(tx + 5)
        << ' ' << fmt(ty - 5) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
  }

  out << "</svg>\n";
}

}  // namespace invnav
