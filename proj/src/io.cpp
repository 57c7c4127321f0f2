#include "growthlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "growthlab/errors.hpp"

namespace growthlab {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_growth_csv(std::ostream& out, const std::vector<GrowthRecord>& records) {
  out << kGrowthCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.n << ',' << format_double(r.log_gamma) << ',' << format_double(r.log_max_fwd) << ','
        << format_double(r.log_min_fwd) << ',' << format_double(r.argmax_start) << ','
        << format_double(r.argmin_start) << '\n';
  }
}

namespace {

double parse_field(const std::string& s, int line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw ArgumentError("growth csv line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<GrowthRecord> read_growth_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("growth csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kGrowthCsvHeader) throw ArgumentError("growth csv: unexpected header '" + line + "'");
  std::vector<GrowthRecord> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 6) {
      throw ArgumentError("growth csv line " + std::to_string(lineno) + ": expected 6 fields");
    }
    GrowthRecord r;
    const double n = parse_field(fields[0], lineno);
    r.n = static_cast<std::int64_t>(n);
    if (static_cast<double>(r.n) != n || r.n < 1) {
      throw ArgumentError("growth csv line " + std::to_string(lineno) + ": bad n");
    }
    r.log_gamma = parse_field(fields[1], lineno);
    r.log_max_fwd = parse_field(fields[2], lineno);
    r.log_min_fwd = parse_field(fields[3], lineno);
    r.argmax_start = parse_field(fields[4], lineno);
    r.argmin_start = parse_field(fields[5], lineno);
    out.push_back(r);
  }
  return out;
}

Json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json to_json(const ValidationReport& r) {
  return Json{{"ok", r.ok()},
              {"monotone_ok", r.monotone_ok},
              {"endpoints_ok", r.endpoints_ok},
              {"min_derivative", number_json(r.min_derivative)},
              {"min_derivative_at", number_json(r.min_derivative_at)},
              {"max_derivative", number_json(r.max_derivative)},
              {"probe_count", r.probe_count},
              {"message", r.message}};
}

Json to_json(const FixedPointReport& r) {
  Json points = Json::array();
  for (const auto& p : r.points) {
    Json s{{"location", number_json(p.location)},
           {"stratum", p.stratum.label()},
           {"fixed_interval_endpoint", p.fixed_interval_endpoint}};
    if (p.stratum.kind == Stratum::Kind::E1) s["multiplier"] = number_json(p.stratum.multiplier);
    if (p.stratum.kind == Stratum::Kind::Ek) s["derivative"] = number_json(p.stratum.derivative);
    points.push_back(s);
  }
  Json intervals = Json::array();
  for (const auto& iv : r.fixed_intervals) {
    intervals.push_back(Json::array({number_json(iv.lo), number_json(iv.hi)}));
  }
  return Json{{"points", points},
              {"fixed_intervals", intervals},
              {"has_fixed_interval", !r.fixed_intervals.empty()},
              {"V", number_json(r.V)},
              {"detection_grid", r.detection_grid}};
}

Json to_json(const ExponentFit& f) {
  return Json{{"mode", to_string(f.mode)},
              {"slope", number_json(f.slope)},
              {"intercept", number_json(f.intercept)},
              {"r_squared", number_json(f.r_squared)},
              {"window", Json::array({number_json(f.window.lo), number_json(f.window.hi)})},
              {"points", f.points}};
}

Json to_json(const LemmaReport& r) {
  Json details = Json::object();
  for (const auto& [k, v] : r.details) details[k] = number_json(v);
  return Json{{"lemma", r.lemma},
              {"status", to_string(r.status)},
              {"quantity", r.quantity},
              {"measured", number_json(r.measured)},
              {"bound", Json::array({number_json(r.bound_lo), number_json(r.bound_hi)})},
              {"worst_location", number_json(r.worst_location)},
              {"note", r.note},
              {"details", details}};
}

}  // namespace growthlab
