#pragma once

#include <iostream>
#include <string>
#include <vector>

#include "nlchb/config.hpp"
#include "nlchb/physics.hpp"

namespace nlchb {

/// Process-level overrides shared by all commands.
struct CommandEnv {
  std::string output_dir;  ///< overrides the configured directory when non-empty
  int threads = 1;
  std::ostream* log = &std::cout;
};

/// Reads NLCHB_OUTPUT_DIR and NLCHB_THREADS.
CommandEnv env_from_environment();

/// Exit codes of the run-style commands.
enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitBlowUp = 2, kExitInvariant = 3 };

/// Validates assumptions, advances to t_end writing ledger.csv, images and
/// snapshots at the cadence plus checkpoint.nlchb at the end. On blow-up the
/// last finite state goes to blowup.nlchb with blowup.txt alongside.
int cmd_run(const RunConfig& config, const CommandEnv& env);

/// Continues a run from a snapshot that carries its configuration.
int cmd_resume(const std::string& checkpoint, const CommandEnv& env);

/// Solution sweep against the local reference; writes sweep_eps.csv.
int cmd_sweep_eps(const RunConfig& config, const std::vector<double>& eps_list, const CommandEnv& env);

/// Energy and weak-operator sweeps on the initial phi; writes gamma_sweep.csv
/// and weak_operator.csv (one pair per grid size when `grids` is non-empty).
int cmd_gamma_sweep(const RunConfig& config, const std::vector<double>& eps_list, const CommandEnv& env,
                    const std::vector<int>& grids = {});

struct OracleHooks {
  bool corrupt_kernel_symmetry = false;  ///< test hook: perturb one lattice entry
};

/// Brute-force oracles on a small grid (<= 32^2); prints a pass/fail table.
int cmd_oracle(const RunConfig& config, const CommandEnv& env, const OracleHooks& hooks = {});

/// Prints the assumption report as JSON; exit 0 iff every check passes.
int cmd_validate(const RunConfig& config, const CommandEnv& env);

/// JSON text of a validation report.
std::string report_json(const ValidationReport& report);

}  // namespace nlchb
