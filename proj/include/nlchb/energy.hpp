#pragma once

#include <string>
#include <vector>

#include "nlchb/kernel.hpp"
#include "nlchb/physics.hpp"
#include "nlchb/state.hpp"

namespace nlchb {

/// (a phi, phi) - (phi, J * phi), one convolution.
double e_nl(const KernelGrid& kernel, const CoefficientA& a, const ScalarField& phi);

/// 1/2 sum_x sum_y J(x - y)(phi(x) - phi(y))^2 dx^2 dy^2 by the O(N^2) double sum; nx*ny <= 4096.
double e_nl_direct(const KernelGrid& kernel, const ScalarField& phi);

/// 1/2 |grad phi|^2 with the compact face gradient, i.e. -(Lap_N phi, phi)/2.
double e_local(const ScalarField& phi);

/// Model constants every energy evaluation needs; kernel/a are required in nonlocal mode.
struct EnergyModel {
  Mode mode = Mode::kNonlocal;
  const PotentialParams* potential = nullptr;
  const MaterialParams* material = nullptr;
  const KernelGrid* kernel = nullptr;
  const CoefficientA* a = nullptr;
};

struct EnergyParts {
  double interface;   ///< E_nl, or E_l in local mode
  double F_integral;  ///< int eta_F F(phi)
  double kinetic;     ///< |u|^2 / (2 K l_c)
  double thermal;     ///< |theta|^2 / (2 l_h)
  double total;
};

/// Nonlocal: 2E = (E_nl + 2 int F)/l_c + |u|^2/(K l_c) + |theta|^2/l_h.
/// Local:    2E = int(|grad phi|^2/2 + F)/l_c + |u|^2/(K l_c) + |theta|^2/l_h.
EnergyParts energy_parts(const SimState& state, const EnergyModel& model);
double total_energy(const SimState& state, const EnergyModel& model);

struct DissipationParts {
  double chemical;  ///< |grad mu|^2 / l_c
  double viscous;   ///< 2 |sqrt(nu) D u|^2 / (K l_c)
  double thermal;   ///< kappa |grad theta|^2 / l_h
  double total;
};

DissipationParts dissipation(const SimState& state, const ScalarField& mu, const MaterialParams& mat);

/// Power of the external forces, weighted like the energy they feed.
struct WorkTerms {
  double q;     ///< (q, u)/(K l_c)
  double buoy;  ///< (l(phi, theta) g, u)/(K l_c)
  double z;     ///< (z, theta)/l_h
  double gu;    ///< (g.u, theta)/l_h
  double total() const { return q + buoy + z + gu; }
};

WorkTerms work_terms(const SimState& state, const Forcing& forcing, const MaterialParams& mat);

/// r = E(next) - E(prev) + dt D(next, mu_used) - dt W(next). The discrete
/// analogue of the energy inequality is r <= tolerance.
double energy_budget_residual(const SimState& prev, const SimState& next, const ScalarField& mu_used, double dt,
                              const Forcing& forcing, const EnergyModel& model);

/// One ledger row; columns in CSV order.
struct LedgerRow {
  double t;
  double E_total;
  double E_interface;
  double F_integral;
  double kinetic;
  double thermal;
  double dissipation;
  double work_q;
  double work_buoy;
  double work_z;
  double work_gu;
  double residual;
  double mass_phi;
  double mean_h;
  double max_div_u;
  double max_u;
  double dt_used;
};

const std::vector<std::string>& ledger_columns();
std::vector<double> ledger_values(const LedgerRow& row);

class EnergyLedger {
public:
  /// Throws unless t increases strictly and every entry is finite.
  void append(const LedgerRow& row);
  const std::vector<LedgerRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

private:
  std::vector<LedgerRow> rows_;
};

/// Builds the row for a state; residual and dt are supplied by the stepper.
LedgerRow make_ledger_row(const SimState& state, const ScalarField& mu, const Forcing& forcing,
                          const EnergyModel& model, double residual, double dt);

}  // namespace nlchb
