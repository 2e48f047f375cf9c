#pragma once

#include <array>
#include <string>
#include <vector>

#include "nlchb/grid.hpp"
#include "nlchb/kernel.hpp"

namespace nlchb {

/// Polynomial potential F(s) = sum_k coeffs[k] s^k, entering mu as eta_F F'(phi).
struct PotentialParams {
  double eta_F = 1.0;
  std::vector<double> coeffs{0.25, 0.0, -0.5, 0.0, 0.25};  ///< ascending; default (s^2-1)^2/4

  /// Throws unless eta_F > 0 and the leading coefficient is positive with even degree.
  void validate() const;
  int degree() const;
};

struct PotentialValue {
  double F;
  double dF;
  double ddF;
};

/// F, F', F'' at s (without the eta_F factor).
PotentialValue potential_eval(const PotentialParams& p, double s);

struct MaterialParams {
  double K_cap = 1.0;   ///< capillarity
  double l_c = 1.0;     ///< latent-heat coupling in mu
  double l_h = 1.0;     ///< latent-heat constant in the heat equation
  double kappa = 1.0;   ///< thermal conductivity
  double nu_min = 0.5;
  double nu_max = 1.0;
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double alpha2 = 1.0;
  std::array<double, 2> g{0.0, -1.0};

  void validate() const;
  double nu_bar() const { return 0.5 * (nu_min + nu_max); }
};

/// nu(s) = nu_min + (nu_max - nu_min)(1 + tanh s)/2.
double viscosity(const MaterialParams& m, double s);

/// (alpha0 + alpha1 phi + alpha2 theta) g averaged onto interior faces; wall faces are 0.
MacVelocity buoyancy(const ScalarField& phi, const ScalarField& theta, const MaterialParams& m);

/// a phi - J * phi + eta_F F'(phi) + l_c theta.
ScalarField mu_nonlocal(const ScalarField& phi, const ScalarField& theta, const KernelGrid& kernel,
                        const CoefficientA& a, const PotentialParams& pot, const MaterialParams& mat);

/// -Lap_N phi + eta_F F'(phi) + l_c theta.
ScalarField mu_local(const ScalarField& phi, const ScalarField& theta, const PotentialParams& pot,
                     const MaterialParams& mat);

/// Numerical check of the standing assumptions on kernel, viscosity and potential.
/// The potential entering the checks is eta_F F, the one that appears in mu.
struct ValidationReport {
  // (A1)
  double a_min = 0.0;
  double a_max = 0.0;
  double kernel_l1 = 0.0;
  double kernel_grad_l1 = 0.0;
  bool kernel_symmetric = false;
  bool kernel_nonnegative = false;
  bool a1_ok = false;
  // (A2)
  double nu_sample_min = 0.0;
  double nu_sample_max = 0.0;
  bool a2_ok = false;
  // (A3)
  double min_ddF = 0.0;  ///< min over s_range of eta_F F''
  double c0 = 0.0;       ///< min over s_range and grid of eta_F F''(s) + a(x)
  bool a3_ok = false;
  // (A4)
  double c1 = 0.0;
  double c2 = 0.0;
  double half_l1 = 0.0;
  std::size_t a4_violations = 0;
  bool a4_ok = false;
  // (A5)
  double p = 2.0;
  double c3 = 0.0;
  double c4 = 0.0;
  std::size_t a5_violations = 0;
  bool a5_ok = false;         ///< feasible on s_range
  bool a5_global = false;     ///< polynomial growth permits the bound on all of R
  // (A6)
  bool a6_ok = true;
  double s_min = -3.0;
  double s_max = 3.0;
  std::vector<std::string> flags;  ///< one line per failed check

  bool all_ok() const { return flags.empty(); }
};

/// kernel/a may be null for local mode (A1 and A4's ||J|| comparison are then skipped).
ValidationReport validate_assumptions(const KernelGrid* kernel, const CoefficientA* a,
                                      const PotentialParams& pot, const MaterialParams& mat,
                                      double s_max = 3.0);

}  // namespace nlchb
