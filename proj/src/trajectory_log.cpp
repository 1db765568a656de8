#include "invnav/trajectory_log.hpp"

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace invnav {

std::string format_double(double value) {
  char buf[32];
  // %.17g round-trips but carries noise digits; try increasing precision
  // until the value survives a parse round trip.
  for (int prec = 9; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

void write_trace_csv(const TrajectoryLog& log, std::ostream& out) {
  out << "t,agent,x,y,heading,v,omega,Wx,Wy,disc_r,plan_ms,event\n";
  for (const auto& r : log.rows) {
    out << format_double(r.t) << ',' << r.agent << ',' << format_double(r.x) << ','
        << format_double(r.y) << ',' << format_double(r.heading) << ',' << format_double(r.v)
        << ',' << format_double(r.omega) << ',' << format_double(r.wx) << ','
        << format_double(r.wy) << ',' << format_double(r.disc_r) << ','
        << format_double(r.plan_ms) << ',' << r.event << '\n';
  }
}

std::string trace_csv_string(const TrajectoryLog& log) {
  std::ostringstream out;
  write_trace_csv(log, out);
  return out.str();
}

TrajectoryLog read_trace_csv(std::istream& in) {
  TrajectoryLog log;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("trace csv: empty input");
  if (line.rfind("t,agent,", 0) != 0) throw std::runtime_error("trace csv: unexpected header");

  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    fields.push_back(cur);
    if (fields.size() != 12) {
      throw std::runtime_error("trace csv: line " + std::to_string(line_no) +
                               ": expected 12 fields");
    }
    LogRow r;
    r.t = std::strtod(fields[0].c_str(), nullptr);
    r.agent = std::atoi(fields[1].c_str());
    r.x = std::strtod(fields[2].c_str(), nullptr);
    r.y = std::strtod(fields[3].c_str(), nullptr);
    r.heading = std::strtod(fields[4].c_str(), nullptr);
    r.v = std::strtod(fields[5].c_str(), nullptr);
    r.omega = std::strtod(fields[6].c_str(), nullptr);
    r.wx = std::strtod(fields[7].c_str(), nullptr);
    r.wy = std::strtod(fields[8].c_str(), nullptr);
    r.disc_r = std::strtod(fields[9].c_str(), nullptr);
    r.plan_ms = std::strtod(fields[10].c_str(), nullptr);
    r.event = fields[11];
    log.rows.push_back(std::move(r));
  }
  return log;
}

}  // namespace invnav
