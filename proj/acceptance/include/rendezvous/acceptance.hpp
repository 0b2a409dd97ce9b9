#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace rdv::acceptance {

struct Options {
  std::filesystem::path scenario_dir;
  int seeds = 20;
  std::vector<int> only;  ///< empty means every criterion
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Runs the selected criteria, printing one PASS/FAIL line per criterion to `log` as it goes.
std::vector<CriterionResult> run_all(const Options& options, std::ostream& log);

}  // namespace rdv::acceptance
