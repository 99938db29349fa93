#include <CLI11.hpp>

#include "hybridplace/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hybrid TOA-RSS-AOA sensor placement design toolkit"};
  app.require_subcommand(1);

  hybridplace::CommandOptions opts;
  std::string orientation_path;
  double resolution = 1.0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config_path, "run configuration file")
        ->required();
    cmd->add_option("--seed", opts.seed, "override the [solver] seed");
    cmd->add_option("--out", opts.out, "override the output directory");
  };

  CLI::App* design = app.add_subcommand(
      "design", "optimize sensor orientations for the configured criterion");
  add_common(design);

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "report A/D/E criterion values for a given orientation");
  add_common(evaluate);
  evaluate
      ->add_option("--orientation", orientation_path,
                   "orientation matrix file (m rows, n columns)")
      ->required();

  CLI::App* mse = app.add_subcommand(
      "mse", "Monte-Carlo MSE of the maximum-likelihood estimator");
  add_common(mse);

  CLI::App* brute = app.add_subcommand(
      "bruteforce", "exhaustive angle-grid design search (2D, m <= 3)");
  add_common(brute);
  brute->add_option("--resolution", resolution, "grid resolution in degrees")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (design->parsed()) return hybridplace::cmd_design(opts);
  if (evaluate->parsed()) return hybridplace::cmd_evaluate(opts, orientation_path);
  if (mse->parsed()) return hybridplace::cmd_mse(opts);
  if (brute->parsed()) return hybridplace::cmd_bruteforce(opts, resolution);
  return 1;
}
