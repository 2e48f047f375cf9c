#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "nlchb/solver.hpp"

namespace nlchb {

/// One row per epsilon (strictly decreasing), named scalar columns, and a
/// metadata block. Ratios are only formed between adjacent valid rows.
class SweepReport {
public:
  SweepReport(std::string kind, std::vector<std::string> columns, std::vector<std::string> ratio_columns = {});

  void add_row(double epsilon, std::vector<double> values, bool valid = true);
  void add_metadata(std::string key, std::string value);

  const std::string& kind() const { return kind_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::string>& ratio_columns() const { return ratio_columns_; }
  const std::vector<std::pair<std::string, std::string>>& metadata() const { return metadata_; }
  std::size_t size() const { return eps_.size(); }
  double epsilon(std::size_t row) const { return eps_.at(row); }
  bool valid(std::size_t row) const { return valid_.at(row); }

  double value(std::size_t row, const std::string& column) const;
  std::vector<double> column(const std::string& name) const;
  /// column[k-1] / column[k]; NaN for the first row or when either row is invalid.
  std::vector<double> ratios(const std::string& name) const;
  /// Over the valid rows, in sweep order (i.e. as epsilon decreases).
  bool strictly_decreasing(const std::string& name) const;

  /// "# key: value" lines, then a header "epsilon,valid,<columns>,ratio_<col>...".
  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;

private:
  std::size_t index_of(const std::string& column) const;

  std::string kind_;
  std::vector<std::string> columns_;
  std::vector<std::string> ratio_columns_;
  std::vector<std::pair<std::string, std::string>> metadata_;
  std::vector<double> eps_;
  std::vector<std::vector<double>> rows_;
  std::vector<bool> valid_;
};

/// Per epsilon: E_nl^eps(phi), E_l(phi), |E_nl - E_l|, the Dirichlet integral
/// |grad phi|^2 = 2 E_l and |E_nl - |grad phi|^2|, the discrete second moment
/// sum J x_1^2 and whether the kernel is resolved. Kernels are built in
/// parallel on up to `threads` threads.
SweepReport gamma_sweep(const ScalarField& phi, const std::vector<double>& eps_list, double gamma,
                        MollifierShape shape = MollifierShape::kBump, int threads = 1);

/// Per epsilon: the bilinear form int (a phi1 - J*phi1) phi2, its transpose,
/// the local target int grad phi1 . grad phi2 and the errors.
SweepReport weak_operator_check(const ScalarField& phi1, const ScalarField& phi2, const std::vector<double>& eps_list,
                                double gamma, MollifierShape shape = MollifierShape::kBump, int threads = 1);

/// Shared setup of a solution sweep; every run starts from `initial`.
struct SolutionSweepConfig {
  explicit SolutionSweepConfig(const Grid& g) : grid(g), initial(g), forcing(g) {}
  Grid grid;
  MaterialParams material;
  PotentialParams potential;
  SolverConfig solver;  ///< dt, t_end, gamma, shape and stabilization; mode and epsilon are set per run
  SimState initial;
  Forcing forcing;
  int samples = 100;  ///< time samples for the L2(0,T) distances (plus t = 0)
  int threads = 1;
};

/// Runs the local reference and one nonlocal run per epsilon with identical
/// data and time step. Columns: end-time and L2(0,T;L2) distances of phi,
/// theta and u to the reference, the end-time energy, its gap to the local
/// energy, the gap to the natural local energy (E_l + int F)/l_c + ..., and the
/// mass drift. A run that blows up is marked invalid.
SweepReport solution_sweep(const SolutionSweepConfig& config, const std::vector<double>& eps_list);

/// phi0 = amplitude cos(2 pi x / Lx) cos(pi y / Ly) + mean, theta0 = 0, u0 = 0.
SimState spinodal_state(const Grid& grid, double amplitude = 0.2, double mean = 0.0);

}  // namespace nlchb
