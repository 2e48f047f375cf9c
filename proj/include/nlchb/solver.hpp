#pragma once

#include <memory>
#include <optional>

#include "nlchb/energy.hpp"
#include "nlchb/kernel.hpp"
#include "nlchb/physics.hpp"
#include "nlchb/state.hpp"

namespace nlchb {

struct SolverConfig {
  double dt = 1e-4;
  double t_end = 0.1;
  Mode mode = Mode::kNonlocal;
  /// Linear stabilization S; negative selects the default
  /// eta_F max_{|s|<=2} |F''(s)| / 2 + 1.
  double stabilization = -1.0;
  double epsilon = 0.1;
  double gamma = 0.5;
  MollifierShape shape = MollifierShape::kBump;
  double safety = 0.5;
  int cadence = 100;           ///< steps between ledger flushes / images / snapshots
  bool check_invariants = false;

  void validate() const;
};

/// Everything that stays fixed during a run: grid, parameters, the sampled
/// kernel with a(x), and the implicit Cahn-Hilliard symbol.
class Model {
public:
  Model(const Grid& grid, const MaterialParams& material, const PotentialParams& potential,
        const SolverConfig& config);

  const Grid& grid() const { return grid_; }
  const MaterialParams& material() const { return material_; }
  const PotentialParams& potential() const { return potential_; }
  const SolverConfig& config() const { return config_; }
  Mode mode() const { return config_.mode; }
  const KernelGrid* kernel() const { return kernel_ ? &*kernel_ : nullptr; }
  const CoefficientA* a() const { return a_ ? &*a_ : nullptr; }
  double stabilization() const { return stabilization_; }
  /// Per cosine mode: symbol of the implicit part B = L_ref + S of the chemical
  /// potential (L_ref = reflected nonlocal operator, or -Lap_N in local mode).
  const SpectralField& implicit_symbol() const { return implicit_symbol_; }
  EnergyModel energy_model() const;

  /// mu(phi, theta) for the configured mode.
  ScalarField chemical_potential(const ScalarField& phi, const ScalarField& theta) const;

private:
  Grid grid_;
  MaterialParams material_;
  PotentialParams potential_;
  SolverConfig config_;
  std::optional<KernelGrid> kernel_;
  std::optional<CoefficientA> a_;
  double stabilization_ = 1.0;
  SpectralField implicit_symbol_;
};

/// Default S for a potential: eta_F max_{|s|<=2} |F''(s)| / 2 + 1.
double default_stabilization(const PotentialParams& potential);

/// Thrown when a step produces non-finite values; carries the last finite state.
class BlowUp : public Error {
public:
  BlowUp(const std::string& what, SimState last_good) : Error(what), last_good_(std::move(last_good)) {}
  const SimState& last_good() const { return last_good_; }

private:
  SimState last_good_;
};

struct ChStep {
  ScalarField phi;
  ScalarField mu;  ///< stabilized potential mu(phi^n) + B (phi^{n+1} - phi^n)
};

/// (phi^{n+1} - phi^n)/dt + div(u^n phi^n) = Lap_N [mu(phi^n, theta^n) + B (phi^{n+1} - phi^n)].
ChStep step_ch(const SimState& state, double dt, const Model& model);

/// h = theta - l_h phi:  (I/dt - kappa Lap_N) theta^{n+1} = h^n/dt - div(u^n h^n) + g.u^n + z + l_h phi^{n+1}/dt.
ScalarField step_heat(const SimState& state, const ScalarField& phi_next, double dt, const Model& model,
                      const ScalarField& z);

/// Momentum with implicit nu_bar Lap, explicit variable-viscosity remainder,
/// skew-symmetric advection, Korteweg force -K phi grad(mu - l_c theta)
/// (the gradient part of K(mu - l_c theta) grad phi is absorbed by the
/// pressure), buoyancy and q. The right-hand side is projected before the
/// implicit viscous solve and the result again after it.
MacVelocity step_ns(const SimState& state, const ScalarField& phi_next, const ScalarField& theta_next,
                    const ScalarField& mu, double dt, const Model& model, const MacVelocity& q);

/// Discrete Leray projection u* - grad psi with Lap_N psi = div u*.
MacVelocity project(const MacVelocity& u_star);

/// One full step phi -> theta -> u. residual (optional) receives the energy
/// budget residual of the step. Throws BlowUp on non-finite output.
SimState advance(const SimState& state, const Model& model, const Forcing& forcing, double dt,
                 double* residual = nullptr);

/// min(advective CFL, explicit viscous limit, stiffness bound) * safety.
double suggest_dt(const SimState& state, const Model& model);

}  // namespace nlchb
