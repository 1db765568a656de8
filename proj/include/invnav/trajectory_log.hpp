#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace invnav {

// One planning instance of one agent. Rows are ordered by (t, agent).
struct LogRow {
  double t = 0.0;
  int agent = 0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double v = 0.0;
  double omega = 0.0;
  double wx = 0.0;      // selected waypoint, global frame
  double wy = 0.0;
  double disc_r = 0.0;  // invariant-disc radius; 0 when stopped or baseline
  double plan_ms = 0.0; // wall-clock of the planning step; 0 unless timings enabled
  std::string event;    // semicolon-joined tokens, empty when uneventful
};

struct TrajectoryLog {
  std::vector<LogRow> rows;
};

// Header: t,agent,x,y,heading,v,omega,Wx,Wy,disc_r,plan_ms,event
void write_trace_csv(const TrajectoryLog& log, std::ostream& out);
std::string trace_csv_string(const TrajectoryLog& log);

// Inverse of write_trace_csv; throws std::runtime_error on malformed input.
TrajectoryLog read_trace_csv(std::istream& in);

// Shortest round-trippable decimal form, shared by every CSV writer so
// identical runs serialize to identical bytes.
std::string format_double(double value);

}  // namespace invnav
