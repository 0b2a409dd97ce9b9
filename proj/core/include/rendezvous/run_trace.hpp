#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rendezvous/mission_controller.hpp"

namespace rdv {

const char* library_version() noexcept;

/// What a finished (or timed-out) run amounts to.
struct RunSummary {
  Phase final_phase = Phase::Gathering;
  std::string decision = "none";  ///< "rendezvous" | "abort" | "none"
  std::optional<double> decision_time;
  std::size_t ticks = 0;
  double mission_time = 0.0;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  std::optional<double> capture_distance;
  bool safety_ok = true;
  std::optional<std::size_t> first_violation;
  bool timed_out = false;

  bool operator==(const RunSummary&) const = default;
};

/// A run as stored on disk: config echo, per-tick rows, summary.
struct RunTrace {
  nlohmann::json header;
  std::vector<TickRecord> rows;
  RunSummary summary;
};

enum class TraceFormat { Csv, Jsonl };
std::optional<TraceFormat> parse_trace_format(const std::string& text);

/// Values are written with fixed precision (times, energies and positions to three
/// decimals) so that identical runs produce byte-identical files and CSV and JSONL
/// decode to the same records.
void write_trace(std::ostream& out, const RunTrace& trace, TraceFormat format);
/// Reads either format; the first line decides which.
RunTrace read_trace(std::istream& in);

/// Applies the on-disk rounding to a record; read_trace(write_trace(r)) == quantize(r).
TickRecord quantize(const TickRecord& record);
RunSummary quantize(const RunSummary& summary);

nlohmann::json summary_to_json(const RunSummary& summary);

}  // namespace rdv
