#include "rendezvous/run_trace.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <variant>

#include "rendezvous/errors.hpp"

#ifndef RENDEZVOUS_VERSION
#define RENDEZVOUS_VERSION "0.0.0"
#endif

namespace rdv {

using nlohmann::json;

const char* library_version() noexcept { return RENDEZVOUS_VERSION; }

namespace {

enum class Kind { Integer, Fixed3, Precise, Text };

using Member = std::variant<std::size_t TickRecord::*, int TickRecord::*, double TickRecord::*,
                            std::optional<double> TickRecord::*, std::string TickRecord::*, Phase TickRecord::*,
                            PlanSource TickRecord::*>;

struct Column {
  const char* name;
  Member member;
  Kind kind;
};

const std::vector<Column>& columns() {
  static const std::vector<Column> cols = {
      {"tick", &TickRecord::tick, Kind::Integer},
      {"time", &TickRecord::time, Kind::Fixed3},
      {"phase", &TickRecord::phase, Kind::Text},
      {"event", &TickRecord::event, Kind::Text},
      {"x", &TickRecord::x, Kind::Fixed3},
      {"y", &TickRecord::y, Kind::Fixed3},
      {"energy", &TickRecord::energy, Kind::Fixed3},
      {"theta_true", &TickRecord::theta_true, Kind::Fixed3},
      {"theta_measured", &TickRecord::theta_measured, Kind::Fixed3},
      {"velocity_measured", &TickRecord::velocity_measured, Kind::Fixed3},
      {"historical_velocity", &TickRecord::historical_velocity, Kind::Fixed3},
      {"solve_status", &TickRecord::solve_status, Kind::Text},
      {"solver_iterations", &TickRecord::solver_iterations, Kind::Integer},
      {"plan_source", &TickRecord::plan_source, Kind::Text},
      {"t1", &TickRecord::t1, Kind::Fixed3},
      {"t2", &TickRecord::t2, Kind::Fixed3},
      {"t3", &TickRecord::t3, Kind::Fixed3},
      {"t4", &TickRecord::t4, Kind::Fixed3},
      {"e1", &TickRecord::e1, Kind::Fixed3},
      {"e2", &TickRecord::e2, Kind::Fixed3},
      {"e3", &TickRecord::e3, Kind::Fixed3},
      {"e4", &TickRecord::e4, Kind::Fixed3},
      {"rendezvous_time", &TickRecord::rendezvous_time, Kind::Fixed3},
      {"predicted_theta", &TickRecord::predicted_theta, Kind::Fixed3},
      {"predicted_variance", &TickRecord::predicted_variance, Kind::Precise},
      {"rho_downside", &TickRecord::rho_downside, Kind::Fixed3},
      {"threshold", &TickRecord::threshold, Kind::Fixed3},
      {"abort_energy", &TickRecord::abort_energy, Kind::Fixed3},
      {"abort_duration", &TickRecord::abort_duration, Kind::Fixed3},
      {"time_budget", &TickRecord::time_budget, Kind::Fixed3},
      {"vx", &TickRecord::vx, Kind::Fixed3},
      {"vy", &TickRecord::vy, Kind::Fixed3},
      {"distance", &TickRecord::distance, Kind::Fixed3},
  };
  return cols;
}

std::string format_number(double v, Kind kind) {
  if (std::isnan(v)) return {};
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  if (kind == Kind::Fixed3) {
    std::snprintf(buf, sizeof buf, "%.3f", v);
    if (std::string_view(buf) == "-0.000") return "0.000";
  } else {
    std::snprintf(buf, sizeof buf, "%.9g", v);
  }
  return buf;
}

double parse_number(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw DataError("malformed number '" + s + "' in trace", 0);
  return v;
}

double round_trip(double v, Kind kind) {
  const std::string s = format_number(v, kind);
  return s.empty() ? v : parse_number(s);
}

/// Cell text plus whether it must be quoted in JSON.
struct Cell {
  std::string text;
  bool is_string = false;
  bool is_null = false;
};

Cell encode(const TickRecord& r, const Column& c) {
  return std::visit(
      [&](auto member) -> Cell {
        using T = std::remove_cvref_t<decltype(r.*member)>;
        const auto& value = r.*member;
        if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, int>) {
          return {std::to_string(value)};
        } else if constexpr (std::is_same_v<T, double>) {
          const std::string s = format_number(value, c.kind);
          return {s, std::isinf(value), s.empty()};
        } else if constexpr (std::is_same_v<T, std::optional<double>>) {
          if (!value) return {"", false, true};
          const std::string s = format_number(*value, c.kind);
          return {s, std::isinf(*value), s.empty()};
        } else if constexpr (std::is_same_v<T, std::string>) {
          return {value, true};
        } else {
          return {to_string(value), true};
        }
      },
      c.member);
}

void decode(TickRecord& r, const Column& c, const std::optional<std::string>& text) {
  std::visit(
      [&](auto member) {
        using T = std::remove_cvref_t<decltype(r.*member)>;
        auto& value = r.*member;
        const std::string s = text.value_or("");
        if constexpr (std::is_same_v<T, std::size_t>) {
          value = static_cast<std::size_t>(std::stoull(s));
        } else if constexpr (std::is_same_v<T, int>) {
          value = std::stoi(s);
        } else if constexpr (std::is_same_v<T, double>) {
          value = s.empty() ? std::numeric_limits<double>::quiet_NaN() : parse_number(s);
        } else if constexpr (std::is_same_v<T, std::optional<double>>) {
          if (s.empty()) value.reset();
          else value = parse_number(s);
        } else if constexpr (std::is_same_v<T, std::string>) {
          value = s;
        } else if constexpr (std::is_same_v<T, Phase>) {
          const auto p = parse_phase(s);
          if (!p) throw DataError("unknown phase '" + s + "' in trace", r.tick);
          value = *p;
        } else {
          const auto p = parse_plan_source(s);
          if (!p) throw DataError("unknown plan source '" + s + "' in trace", r.tick);
          value = *p;
        }
      },
      c.member);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

RunSummary summary_from_json(const json& j) {
  RunSummary s;
  const auto phase = parse_phase(j.at("final_phase").get<std::string>());
  if (!phase) throw DataError("unknown final phase in trace summary", 0);
  s.final_phase = *phase;
  s.decision = j.at("decision").get<std::string>();
  s.decision_time = optional_from(j, "decision_time");
  s.ticks = j.at("ticks").get<std::size_t>();
  s.mission_time = j.at("mission_time").get<double>();
  s.initial_energy = j.at("initial_energy").get<double>();
  s.final_energy = j.at("final_energy").get<double>();
  s.capture_distance = optional_from(j, "capture_distance");
  s.safety_ok = j.at("safety_ok").get<bool>();
  if (j.contains("first_violation") && !j.at("first_violation").is_null())
    s.first_violation = j.at("first_violation").get<std::size_t>();
  s.timed_out = j.at("timed_out").get<bool>();
  return s;
}

const std::string kCsvHeader = "# header: ";
const std::string kCsvSummary = "# summary: ";

}  // namespace

std::optional<TraceFormat> parse_trace_format(const std::string& text) {
  if (text == "csv") return TraceFormat::Csv;
  if (text == "jsonl") return TraceFormat::Jsonl;
  return std::nullopt;
}

TickRecord quantize(const TickRecord& record) {
  TickRecord out = record;
  for (const Column& c : columns()) {
    std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(out.*member)>;
          auto& value = out.*member;
          if constexpr (std::is_same_v<T, double>) value = round_trip(value, c.kind);
          else if constexpr (std::is_same_v<T, std::optional<double>>) {
            if (value) value = round_trip(*value, c.kind);
          }
        },
        c.member);
  }
  return out;
}

RunSummary quantize(const RunSummary& s) {
  RunSummary out = s;
  auto q = [](double v) { return round_trip(v, Kind::Fixed3); };
  if (out.decision_time) out.decision_time = q(*out.decision_time);
  out.mission_time = q(out.mission_time);
  out.initial_energy = q(out.initial_energy);
  out.final_energy = q(out.final_energy);
  if (out.capture_distance) out.capture_distance = q(*out.capture_distance);
  return out;
}

json summary_to_json(const RunSummary& raw) {
  const RunSummary s = quantize(raw);
  return json{
      {"final_phase", to_string(s.final_phase)},
      {"decision", s.decision},
      {"decision_time", optional_json(s.decision_time)},
      {"ticks", s.ticks},
      {"mission_time", s.mission_time},
      {"initial_energy", s.initial_energy},
      {"final_energy", s.final_energy},
      {"capture_distance", optional_json(s.capture_distance)},
      {"safety_ok", s.safety_ok},
      {"first_violation", s.first_violation ? json(*s.first_violation) : json(nullptr)},
      {"timed_out", s.timed_out},
  };
}

void write_trace(std::ostream& out, const RunTrace& trace, TraceFormat format) {
  const auto& cols = columns();
  if (format == TraceFormat::Csv) {
    out << kCsvHeader << trace.header.dump() << '\n';
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i].name;
    out << '\n';
    for (const TickRecord& r : trace.rows) {
      for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << csv_escape(encode(r, cols[i]).text);
      out << '\n';
    }
    out << kCsvSummary << summary_to_json(trace.summary).dump() << '\n';
    return;
  }
  json header = trace.header;
  header["type"] = "header";
  out << header.dump() << '\n';
  for (const TickRecord& r : trace.rows) {
    out << "{\"type\":\"row\"";
    for (const Column& c : cols) {
      const Cell cell = encode(r, c);
      out << ",\"" << c.name << "\":";
      if (cell.is_null) out << "null";
      else if (cell.is_string) out << json(cell.text).dump();
      else out << cell.text;
    }
    out << "}\n";
  }
  json summary = summary_to_json(trace.summary);
  summary["type"] = "summary";
  out << summary.dump() << '\n';
}

namespace {

RunTrace parse_trace(std::istream& in) {
  RunTrace trace;
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty trace", 0);
  const auto& cols = columns();
  bool have_summary = false;

  if (line.rfind(kCsvHeader, 0) == 0) {
    trace.header = json::parse(line.substr(kCsvHeader.size()));
    if (!std::getline(in, line)) throw DataError("trace is missing its column row", 1);
    const auto names = csv_split(line);
    if (names.size() != cols.size()) throw DataError("unexpected column count in trace", 1);
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (names[i] != cols[i].name) throw DataError("unexpected column '" + names[i] + "'", i);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line.rfind(kCsvSummary, 0) == 0) {
        trace.summary = summary_from_json(json::parse(line.substr(kCsvSummary.size())));
        have_summary = true;
        continue;
      }
      const auto cells = csv_split(line);
      if (cells.size() != cols.size()) throw DataError("row has the wrong number of cells", trace.rows.size());
      TickRecord r;
      for (std::size_t i = 0; i < cols.size(); ++i) decode(r, cols[i], cells[i]);
      trace.rows.push_back(std::move(r));
    }
  } else {
    json first = json::parse(line);
    if (first.value("type", "") != "header") throw DataError("trace does not start with a header", 0);
    first.erase("type");
    trace.header = std::move(first);
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      const std::string type = j.value("type", "");
      if (type == "summary") {
        trace.summary = summary_from_json(j);
        have_summary = true;
        continue;
      }
      if (type != "row") throw DataError("unknown record type '" + type + "'", trace.rows.size());
      TickRecord r;
      for (const Column& c : cols) {
        const json& v = j.at(c.name);
        std::optional<std::string> text;
        if (v.is_string()) text = v.get<std::string>();
        else if (v.is_number_integer()) text = std::to_string(v.get<long long>());
        else if (v.is_number()) text = v.dump();
        decode(r, c, text);
      }
      trace.rows.push_back(std::move(r));
    }
  }
  if (!have_summary) throw DataError("trace has no summary line", trace.rows.size());
  return trace;
}

}  // namespace

RunTrace read_trace(std::istream& in) {
  try {
    return parse_trace(in);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed trace: ") + e.what(), 0);
  }
}

}  // namespace rdv
