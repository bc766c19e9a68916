#include <iostream>

#include <CLI11.hpp>

#include "pli/cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Perturbed-law based sensitivity indices for probabilities and quantiles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", PLI_VERSION);

  pli::cli::RunOptions run;
  std::string plot;
  auto* run_cmd = app.add_subcommand("run", "Run a delta-grid study on a recorded sample");
  run_cmd->add_option("--sample", run.sample, "CSV sample: input columns then the output")->required();
  run_cmd->add_option("--config", run.config, "Study configuration (JSON) or a run manifest")->required();
  run_cmd->add_option("--out", run.out_dir, "Output directory")->required();
  run_cmd->add_option("--plot", plot, "Also write a plot (only 'svg')")->check(CLI::IsMember({"svg"}));

  std::string validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a configuration file");
  validate_cmd->add_option("--config", validate_path, "Study configuration")->required();

  pli::cli::SelftestOptions self;
  std::size_t n = 0;
  std::string self_out;
  std::string self_plot;
  auto* self_cmd = app.add_subcommand("selftest", "Run a study on a built-in analytic model");
  self_cmd->add_option("--model", self.model, "linear-gaussian | synthetic-study")->required();
  self_cmd->add_option("--n", n, "Sample size (model default when omitted)");
  self_cmd->add_option("--seed", self.seed, "Seed for sample generation and resampling");
  self_cmd->add_option("--out", self_out, "Write results to this directory");
  self_cmd->add_option("--plot", self_plot, "Also write a plot (only 'svg')")->check(CLI::IsMember({"svg"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : pli::cli::kExitConfigError;
  }

  if (*run_cmd) {
    run.svg = plot == "svg";
    return pli::cli::cmd_run(run, std::cout, std::cerr);
  }
  if (*validate_cmd) return pli::cli::cmd_validate(validate_path, std::cout, std::cerr);
  if (n > 0) self.n = n;
  if (!self_out.empty()) self.out_dir = self_out;
  self.svg = self_plot == "svg";
  return pli::cli::cmd_selftest(self, std::cout, std::cerr);
}
