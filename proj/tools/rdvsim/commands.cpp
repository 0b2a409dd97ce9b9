#include "commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string_view>

#include "rendezvous/acceptance.hpp"
#include "rendezvous/errors.hpp"
#include "rendezvous/run_trace.hpp"
#include "rendezvous/scenario_config.hpp"
#include "rendezvous/simulator.hpp"

namespace rdvsim {

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + '"';
}

/// One machine-parsable diagnostic line on stderr.
void diagnose(std::string_view kind, std::string_view field, std::string_view message) {
  std::cerr << "rdvsim: error kind=" << kind;
  if (!field.empty()) std::cerr << " field=" << field;
  std::cerr << " message=" << quote(message) << '\n';
}

int report(const std::exception& e) {
  if (const auto* c = dynamic_cast<const rdv::ConfigError*>(&e)) diagnose("config", c->field(), e.what());
  else if (dynamic_cast<const rdv::DomainError*>(&e)) diagnose("domain", "", e.what());
  else if (dynamic_cast<const rdv::DataError*>(&e)) diagnose("data", "", e.what());
  else if (dynamic_cast<const rdv::InputError*>(&e)) diagnose("input", "", e.what());
  else if (dynamic_cast<const rdv::SolverError*>(&e)) diagnose("solver", "", e.what());
  else diagnose("internal", "", e.what());
  return kError;
}

std::filesystem::path default_out_dir() {
  if (const char* dir = std::getenv("RDV_OUT_DIR"); dir && *dir) return dir;
  return ".";
}

int exit_code(const rdv::RunSummary& s) {
  if (s.final_phase == rdv::Phase::FailedEnergy) return kEnergyFailure;
  if (s.timed_out || !rdv::is_terminal(s.final_phase)) {
    diagnose("timeout", "mission.max_duration", "mission did not finish");
    return kError;
  }
  return kOk;
}

std::string fmt3(std::optional<double> v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

std::string summary_line(const std::string& scenario, std::uint64_t seed, const rdv::RunSummary& s) {
  std::ostringstream os;
  os << "scenario=" << scenario << " seed=" << seed << " phase=" << rdv::to_string(s.final_phase)
     << " decision=" << s.decision << " decision_time=" << fmt3(s.decision_time)
     << " final_energy=" << fmt3(s.final_energy) << " capture_distance=" << fmt3(s.capture_distance)
     << " safety=" << (s.safety_ok ? "ok" : "violated");
  return os.str();
}

void write_file(const std::filesystem::path& file, const rdv::RunTrace& trace, rdv::TraceFormat format) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  rdv::write_trace(out, trace, format);
}

}  // namespace

std::filesystem::path bundled_scenario_dir() {
  if (const char* dir = std::getenv("RDV_SCENARIO_DIR"); dir && *dir) return dir;
  if (std::filesystem::is_directory(RDVSIM_SCENARIO_DIR)) return RDVSIM_SCENARIO_DIR;
  std::error_code ec;
  const auto exe = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (!ec) {
    const auto installed = exe.parent_path().parent_path() / "share" / "rendezvous" / "scenarios";
    if (std::filesystem::is_directory(installed)) return installed;
  }
  return RDVSIM_SCENARIO_DIR;
}

std::filesystem::path resolve_scenario(const std::string& name) {
  if (std::filesystem::is_regular_file(name)) return name;
  const auto bundled = bundled_scenario_dir() / (name + ".json");
  if (std::filesystem::is_regular_file(bundled)) return bundled;
  throw rdv::ConfigError("no scenario file or bundled scenario named '" + name + "'", "scenario");
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const auto v = std::stoull(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {v, v};
    }
    const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
    const auto lo = std::stoull(a, &used);
    if (used != a.size()) throw std::invalid_argument(text);
    const auto hi = std::stoull(b, &used);
    if (used != b.size() || hi < lo) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw rdv::ConfigError("expected a seed or an inclusive range a..b, got '" + text + "'", "seeds");
  }
}

int run(const RunArgs& args) {
  try {
    const rdv::ScenarioConfig config = rdv::load_scenario(resolve_scenario(args.scenario));
    const auto format = *rdv::parse_trace_format(args.log_format);
    const std::uint64_t seed = args.seed.value_or(config.seed);
    const rdv::RunResult result = rdv::run_scenario(config, seed);
    const auto& trace = result.trace;
    if (args.verbose) {
      for (const auto& r : trace.rows)
        std::cerr << "t=" << fmt3(r.time) << " phase=" << rdv::to_string(r.phase) << " E=" << fmt3(r.energy)
                  << " t1=" << fmt3(r.t1) << " rho=" << fmt3(r.rho_downside) << " solve=" << r.solve_status
                  << (r.event.empty() ? "" : " event=" + r.event) << '\n';
    }
    const std::filesystem::path file =
        args.out_dir.value_or(default_out_dir()) / (config.name + "-" + std::to_string(seed) + "." + args.log_format);
    write_file(file, trace, format);
    std::cout << summary_line(config.name, seed, trace.summary) << " trace=" << file.string() << '\n';
    return exit_code(trace.summary);
  } catch (const std::exception& e) {
    return report(e);
  }
}

int batch(const BatchArgs& args) {
  try {
    const rdv::ScenarioConfig config = rdv::load_scenario(resolve_scenario(args.scenario));
    const auto [lo, hi] = parse_seed_range(args.seeds);
    const auto format = *rdv::parse_trace_format(args.log_format);
    std::size_t success = 0, aborted = 0, miss = 0, failed = 0, other = 0;
    int code = kOk;
    for (std::uint64_t seed = lo; seed <= hi; ++seed) {
      const rdv::RunResult result = rdv::run_scenario(config, seed);
      const auto& s = result.trace.summary;
      std::cout << summary_line(config.name, seed, s) << '\n';
      write_file(args.out_dir.value_or(default_out_dir()) /
                     (config.name + "-" + std::to_string(seed) + "." + args.log_format),
                 result.trace, format);
      switch (s.final_phase) {
        case rdv::Phase::CompletedSuccess: ++success; break;
        case rdv::Phase::CompletedAborted: ++aborted; break;
        case rdv::Phase::CompletedMiss: ++miss; break;
        case rdv::Phase::FailedEnergy: ++failed; break;
        default: ++other; break;
      }
      const int c = exit_code(s);
      if (c == kEnergyFailure || (c == kError && code == kOk)) code = c;
    }
    std::cout << "total=" << (hi - lo + 1) << " success=" << success << " aborted=" << aborted << " miss=" << miss
              << " failed_energy=" << failed << " unfinished=" << other << '\n';
    return code;
  } catch (const std::exception& e) {
    return report(e);
  }
}

int accept(const AcceptArgs& args) {
  try {
    rdv::acceptance::Options options;
    options.scenario_dir = bundled_scenario_dir();
    options.seeds = args.seeds;
    if (args.only) {
      std::stringstream ss(*args.only);
      std::string item;
      while (std::getline(ss, item, ',')) options.only.push_back(std::stoi(item));
    }
    const auto results = rdv::acceptance::run_all(options, std::cout);
    for (const auto& r : results)
      if (!r.passed) return kError;
    return kOk;
  } catch (const std::exception& e) {
    return report(e);
  }
}

int plotdata(const PlotArgs& args) {
  try {
    std::ifstream in(args.trace, std::ios::binary);
    if (!in) throw rdv::InputError("cannot open " + args.trace.string());
    const rdv::RunTrace trace = rdv::read_trace(in);
    std::ofstream file;
    if (args.out) {
      file.open(*args.out, std::ios::binary);
      if (!file) throw rdv::InputError("cannot write " + args.out->string());
    }
    std::ostream& out = args.out ? file : std::cout;
    auto cell = [](std::optional<double> v) { return v ? fmt3(v) : std::string(); };
    out << "time,phase,energy,e1,e2,e3,e4,rho_downside,threshold,distance\n";
    for (const auto& r : trace.rows)
      out << fmt3(r.time) << ',' << rdv::to_string(r.phase) << ',' << fmt3(r.energy) << ',' << cell(r.e1) << ','
          << cell(r.e2) << ',' << cell(r.e3) << ',' << cell(r.e4) << ',' << cell(r.rho_downside) << ','
          << fmt3(r.threshold) << ',' << fmt3(r.distance) << '\n';
    return kOk;
  } catch (const std::exception& e) {
    return report(e);
  }
}

int validate(const ValidateArgs& args) {
  try {
    const rdv::ScenarioConfig config = rdv::load_scenario(resolve_scenario(args.scenario));
    std::cout << "ok scenario=" << config.name << '\n';
    return kOk;
  } catch (const std::exception& e) {
    return report(e);
  }
}

int usage_error(const std::string& message) {
  diagnose("usage", "", message);
  return kError;
}

}  // namespace rdvsim
