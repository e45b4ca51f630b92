#include "giwe/app.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
  CLI::App cli{"Gauge-invariant phase-space dynamics toolkit"};
  cli.require_subcommand(1);

  std::string config_path;
  CLI::App* run = cli.add_subcommand("run", "run a scenario from a JSON config");
  run->add_option("config", config_path, "path to config.json")->required();

  std::string suite;
  CLI::App* verify =
      cli.add_subcommand("verify", "run a named invariant suite");
  verify
      ->add_option("suite", suite,
                   "transforms|lemmas|kernels|equivalence|conservation|gauge")
      ->required();

  std::string run_dir, what;
  CLI::App* exp = cli.add_subcommand("export", "export run artifacts as CSV");
  exp->add_option("run_dir", run_dir, "completed run directory")->required();
  exp->add_option("what", what, "slice|density|series")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = cli.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (run->parsed()) return giwe::app::cmd_run(config_path);
  if (verify->parsed()) return giwe::app::cmd_verify(suite);
  if (exp->parsed()) return giwe::app::cmd_export(run_dir, what);
  return 2;
}
