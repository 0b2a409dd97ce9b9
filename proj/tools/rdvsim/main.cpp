#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "rendezvous/run_trace.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Risk-aware UAS rendezvous simulator"};
  app.set_version_flag("--version", rdv::library_version());
  app.require_subcommand(1);

  rdvsim::RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Simulate one mission and write its trace");
  run_cmd->add_option("--scenario", run.scenario, "Scenario file or bundled name")->required();
  run_cmd->add_option("--seed", run.seed, "RNG seed (overrides the scenario)");
  run_cmd->add_option("--out", run.out_dir, "Output directory for <scenario>-<seed>.<ext> (default: $RDV_OUT_DIR or .)");
  run_cmd->add_option("--log-format", run.log_format, "Trace format")->check(CLI::IsMember({"csv", "jsonl"}));
  run_cmd->add_flag("--verbose", run.verbose, "Print one line per tick to stderr");

  rdvsim::BatchArgs batch;
  auto* batch_cmd = app.add_subcommand("batch", "Run a seed range and summarise outcomes");
  batch_cmd->add_option("--scenario", batch.scenario, "Scenario file or bundled name")->required();
  batch_cmd->add_option("--seeds", batch.seeds, "Inclusive seed range a..b");
  batch_cmd->add_option("--out,--out-dir", batch.out_dir, "Output directory for the per-seed traces (default: $RDV_OUT_DIR or .)");
  batch_cmd->add_option("--log-format", batch.log_format, "Trace format")->check(CLI::IsMember({"csv", "jsonl"}));

  rdvsim::AcceptArgs accept;
  auto* accept_cmd = app.add_subcommand("accept", "Run the acceptance suite, one PASS/FAIL line per criterion");
  accept_cmd->add_option("--seeds", accept.seeds, "Seeds per scenario for the mission criteria");
  accept_cmd->add_option("--only", accept.only, "Comma-separated criterion numbers");

  rdvsim::PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plotdata", "Extract plot-ready series from a trace");
  plot_cmd->add_option("--trace", plot.trace, "Trace written by run")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--out", plot.out, "Output CSV (default: stdout)");

  rdvsim::ValidateArgs validate;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario file without running it");
  validate_cmd->add_option("--scenario", validate.scenario, "Scenario file or bundled name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return rdvsim::usage_error(e.what());
  }

  if (*run_cmd) return rdvsim::run(run);
  if (*batch_cmd) return rdvsim::batch(batch);
  if (*accept_cmd) return rdvsim::accept(accept);
  if (*plot_cmd) return rdvsim::plotdata(plot);
  if (*validate_cmd) return rdvsim::validate(validate);
  return rdvsim::kError;
}
