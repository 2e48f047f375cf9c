#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlchb/solver.hpp"

namespace nlchb {

struct InitialConfig {
  /// spinodal: amplitude cos(2 pi x/Lx) cos(pi y/Ly) + mean
  /// cosine:   amplitude cos(pi x/Lx) cos(pi y/Ly) + mean
  /// constant: mean everywhere
  /// random:   mean + uniform noise only
  /// snapshot: state read from `file`
  std::string type = "spinodal";
  double amplitude = 0.2;
  double mean = 0.0;
  double noise = 0.0;  ///< uniform perturbation of phi in [-noise, noise], seeded
  std::string file;
};

/// Presets: zero, constant, mode, or a path to a field file (fields "qu","qv" for q; "z" for z).
struct ForcingConfig {
  std::string q = "zero";
  double q_amplitude = 1.0;
  std::string z = "zero";
  double z_amplitude = 1.0;
};

struct OutputConfig {
  std::string directory = "nlchb_out";
  bool csv = true;
  bool ppm = true;
  bool snapshot = true;
};

/// One serializable record for a run. Text form:
///
///   seed = 1
///   [grid]    nx ny lx ly
///   [physics] K l_c l_h kappa nu_min nu_max alpha0 alpha1 alpha2 g_x g_y eta_F F_coeffs
///   [kernel]  mode epsilon gamma shape
///   [solver]  dt (number | auto) t_end stabilization (number | auto) safety cadence check_invariants
///   [initial] type amplitude mean noise file
///   [forcing] q q_amplitude z z_amplitude
///   [output]  directory formats (comma list of csv, ppm, snapshot)
///
/// nx and ny are required; everything else has the defaults of the structs.
struct RunConfig {
  int nx = 64;
  int ny = 64;
  double lx = 1.0;
  double ly = 1.0;
  MaterialParams material;
  PotentialParams potential;
  SolverConfig solver;
  bool dt_auto = false;  ///< dt = suggest_dt(initial state)
  InitialConfig initial;
  ForcingConfig forcing;
  OutputConfig output;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;  ///< non-fatal findings, e.g. an under-resolved kernel

  Grid grid() const { return Grid::make(nx, ny, lx, ly); }
};

/// Carries every problem found, one message per entry.
class ConfigError : public Error {
public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

private:
  std::vector<std::string> errors_;
};

/// Parses and validates; throws ConfigError listing all problems.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(to_text(c)) reproduces c exactly.
std::string to_text(const RunConfig& config);

SimState initial_state(const RunConfig& config);
Forcing make_forcing(const RunConfig& config);

}  // namespace nlchb
