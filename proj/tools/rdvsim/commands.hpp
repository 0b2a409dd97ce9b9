#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace rdvsim {

/// Exit codes shared by every subcommand.
enum Exit : int { kOk = 0, kError = 1, kEnergyFailure = 2 };

struct RunArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  std::string log_format = "csv";
  bool verbose = false;
};

struct BatchArgs {
  std::string scenario;
  std::string seeds = "1..20";
  std::optional<std::filesystem::path> out_dir;
  std::string log_format = "csv";
};

struct AcceptArgs {
  int seeds = 20;
  std::optional<std::string> only;
};

struct PlotArgs {
  std::filesystem::path trace;
  std::optional<std::filesystem::path> out;
};

struct ValidateArgs {
  std::string scenario;
};

int run(const RunArgs& args);
int batch(const BatchArgs& args);
int accept(const AcceptArgs& args);
int plotdata(const PlotArgs& args);
int validate(const ValidateArgs& args);

/// Prints the one-line diagnostic for a command-line usage error.
int usage_error(const std::string& message);

/// Resolves a scenario argument: an existing file, or a bundled scenario name.
std::filesystem::path resolve_scenario(const std::string& name);
std::filesystem::path bundled_scenario_dir();

/// Parses "a..b" (inclusive) or a single seed.
std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text);

}  // namespace rdvsim
