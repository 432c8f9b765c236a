#include <iostream>

#include "CLI11.hpp"
#include "wsntrack/cli.hpp"

#ifndef WSNTRACK_DATA_DIR
#define WSNTRACK_DATA_DIR "data"
#endif

using namespace wsntrack;

int main(int argc, char** argv) {
  CLI::App app{"wsntrack: wireless sensor network target tracking simulator"};
  app.require_subcommand(1);

  RunOptions run_opts;
  std::uint64_t seed = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", run_opts.config_path, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", run_opts.out_dir, "output directory");
    sub->add_option("--seed", seed, "override seed");
    sub->add_option("--set", run_opts.overrides, "override a config key (key=value), repeatable");
  };

  auto* run_cmd = app.add_subcommand("run", "run one scenario; writes trace.csv, metrics.csv, summary.txt");
  add_common(run_cmd);

  std::string mode;
  int replications = 0;
  auto* cmp = app.add_subcommand("compare", "paired-seed comparison; writes comparison.csv and summaries");
  add_common(cmp);
  cmp->add_option("--mode", mode, "baseline | anchors34 | piggyback")->required();
  cmp->add_option("--replications", replications, "number of paired seeds");

  PhaseParams phase;
  phase.field = {100.0, 100.0};
  std::string phase_out = ".";
  auto* ph = app.add_subcommand("phase", "assignment feasibility vs sensor density; writes phase.csv");
  ph->add_option("--targets", phase.targets, "targets per instance")->capture_default_str();
  ph->add_option("--per-target", phase.per_target, "sensors required per target")->capture_default_str();
  ph->add_option("--densities", phase.densities, "sensor densities per m^2")->delimiter(',')->required();
  ph->add_option("--trials", phase.trials, "trials per density")->capture_default_str();
  ph->add_option("--seed", phase.seed, "seed")->capture_default_str();
  ph->add_option("--width", phase.field.width, "field width")->capture_default_str();
  ph->add_option("--height", phase.field.height, "field height")->capture_default_str();
  ph->add_option("--sensing-range", phase.sensing_range, "sensing radius")->capture_default_str();
  ph->add_option("--out", phase_out, "output directory");

  std::string data_path = std::string(WSNTRACK_DATA_DIR) + "/mote_table1.csv";
  std::string mote_out = ".";
  auto* mote = app.add_subcommand("mote-table", "emit the bundled mote load dataset");
  mote->add_option("--data", data_path, "dataset path")->capture_default_str();
  mote->add_option("--out", mote_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (run_cmd->get_option("--seed")->count() || cmp->get_option("--seed")->count()) run_opts.seed = seed;
  if (*cmp && replications > 0) run_opts.overrides.push_back("replications=" + std::to_string(replications));

  if (*run_cmd) return cmd_run(run_opts);
  if (*cmp) return cmd_compare(run_opts, mode);
  if (*ph) return cmd_phase(phase, phase_out);
  return cmd_mote_table(data_path, mote_out);
}
