// Command line front end: run, resume, sweep-eps, gamma-sweep, oracle, validate.
#include <CLI11.hpp>
#include <iostream>

#include "nlchb/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal Cahn-Hilliard-Boussinesq simulator"};
  app.require_subcommand(1);

  std::string config_path, checkpoint;
  std::vector<double> eps;
  std::vector<int> grids;
  bool corrupt = false;

  auto* run = app.add_subcommand("run", "advance a configuration to t_end");
  run->add_option("config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  auto* resume = app.add_subcommand("resume", "continue from a snapshot or checkpoint");
  resume->add_option("checkpoint", checkpoint, "snapshot written by run")->required()->check(CLI::ExistingFile);
  auto* sweep = app.add_subcommand("sweep-eps", "solution sweep against the local reference");
  sweep->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  sweep->add_option("--eps", eps, "strictly decreasing epsilon list")->required()->delimiter(',');
  auto* gamma = app.add_subcommand("gamma-sweep", "energy and weak-operator limits on the initial phi");
  gamma->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  gamma->add_option("--eps", eps, "strictly decreasing epsilon list")->required()->delimiter(',');
  gamma->add_option("--grids", grids, "grid sizes for a refinement axis")->delimiter(',');
  auto* oracle = app.add_subcommand("oracle", "brute-force oracles on a small grid");
  oracle->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  oracle->add_flag("--corrupt-kernel-symmetry", corrupt, "fault injection for testing the oracle table");
  auto* validate = app.add_subcommand("validate", "check the configuration and the model assumptions");
  validate->add_option("config", config_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    const nlchb::CommandEnv env = nlchb::env_from_environment();
    if (*resume) return nlchb::cmd_resume(checkpoint, env);
    const nlchb::RunConfig config = nlchb::load_config(config_path);
    if (*run) return nlchb::cmd_run(config, env);
    if (*sweep) return nlchb::cmd_sweep_eps(config, eps, env);
    if (*gamma) return nlchb::cmd_gamma_sweep(config, eps, env, grids);
    if (*oracle) return nlchb::cmd_oracle(config, env, nlchb::OracleHooks{corrupt});
    if (*validate) return nlchb::cmd_validate(config, env);
  } catch (const nlchb::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return nlchb::kExitFailed;
  }
  return nlchb::kExitFailed;
}
