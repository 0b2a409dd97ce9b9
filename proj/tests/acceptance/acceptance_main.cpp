#include <cstdlib>
#include <iostream>

#include "rendezvous/acceptance.hpp"

int main(int argc, char** argv) {
  rdv::acceptance::Options options;
  options.scenario_dir = argc > 1 ? argv[1] : RDV_SCENARIO_DIR;
  if (const char* seeds = std::getenv("RDV_ACCEPT_SEEDS")) options.seeds = std::atoi(seeds);
  const auto results = rdv::acceptance::run_all(options, std::cout);
  for (const auto& r : results)
    if (!r.passed) return 1;
  return 0;
}
