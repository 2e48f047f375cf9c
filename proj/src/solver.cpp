#include "nlchb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlchb/mac.hpp"
#include "nlchb/spectral.hpp"

namespace nlchb {

void SolverConfig::validate() const {
  std::ostringstream msg;
  if (!(dt > 0.0) || !std::isfinite(dt)) msg << "dt must be positive; ";
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) msg << "t_end must be nonnegative; ";
  if (!std::isfinite(stabilization)) msg << "stabilization must be finite; ";
  if (!(safety > 0.0)) msg << "safety must be positive; ";
  if (cadence < 1) msg << "cadence must be >= 1; ";
  if (mode == Mode::kNonlocal) {
    if (!(epsilon > 0.0)) msg << "epsilon must be positive; ";
    if (!(gamma > 0.0 && gamma < 1.0)) msg << "gamma must lie in (0, d-1) = (0, 1); ";
  }
  if (!msg.str().empty()) throw Error("solver config: " + msg.str());
}

double default_stabilization(const PotentialParams& p) {
  double m = 0.0;
  for (int k = 0; k <= 400; ++k) m = std::max(m, std::abs(potential_eval(p, -2.0 + 4.0 * k / 400).ddF));
  return 0.5 * p.eta_F * m + 1.0;
}

Model::Model(const Grid& grid, const MaterialParams& material, const PotentialParams& potential,
             const SolverConfig& config)
    : grid_(grid), material_(material), potential_(potential), config_(config), implicit_symbol_(grid) {
  material_.validate();
  potential_.validate();
  config_.validate();
  stabilization_ = config_.stabilization >= 0.0 ? config_.stabilization : default_stabilization(potential_);
  if (config_.mode == Mode::kNonlocal) {
    kernel_.emplace(grid_, calibrate_mollifier(config_.gamma, 2, config_.shape), config_.epsilon);
    a_.emplace(compute_a(*kernel_));
    const std::vector<double> sym = kernel_->reflected_symbol();
    for (int l = 0; l < grid_.ny(); ++l)
      for (int k = 0; k < grid_.nx(); ++k)
        implicit_symbol_(k, l) = sym[static_cast<std::size_t>(l) * grid_.nx() + k] + stabilization_;
  } else {
    for (int l = 0; l < grid_.ny(); ++l)
      for (int k = 0; k < grid_.nx(); ++k) implicit_symbol_(k, l) = neumann_eigenvalue(grid_, k, l) + stabilization_;
  }
}

EnergyModel Model::energy_model() const { return EnergyModel{config_.mode, &potential_, &material_, kernel(), a()}; }

ScalarField Model::chemical_potential(const ScalarField& phi, const ScalarField& theta) const {
  if (config_.mode == Mode::kNonlocal) return mu_nonlocal(phi, theta, *kernel_, *a_, potential_, material_);
  return mu_local(phi, theta, potential_, material_);
}

ChStep step_ch(const SimState& s, double dt, const Model& model) {
  const Grid& g = s.grid();
  const SpectralField& B = model.implicit_symbol();
  const ScalarField mu = model.chemical_potential(s.phi, s.theta);
  ScalarField rhs = (1.0 / dt) * s.phi;
  rhs -= advect_scalar(s.u, s.phi);
  rhs += laplacian_neumann(mu - spectral_apply(B, s.phi));
  SpectralField sym(g);
  for (int l = 0; l < g.ny(); ++l)
    for (int k = 0; k < g.nx(); ++k) sym(k, l) = 1.0 / dt + neumann_eigenvalue(g, k, l) * B(k, l);
  ScalarField phi = spectral_solve(sym, rhs);
  ScalarField mu_tilde = mu + spectral_apply(B, phi - s.phi);
  return {std::move(phi), std::move(mu_tilde)};
}

ScalarField step_heat(const SimState& s, const ScalarField& phi_next, double dt, const Model& model,
                      const ScalarField& z) {
  const MaterialParams& m = model.material();
  ScalarField h = s.theta;
  h.axpy(-m.l_h, s.phi);
  ScalarField rhs = (1.0 / dt) * h;
  rhs -= advect_scalar(s.u, h);
  const auto [cu, cv] = face_to_cell(s.u);
  rhs.axpy(m.g[0], cu).axpy(m.g[1], cv);
  rhs += z;
  rhs.axpy(m.l_h / dt, phi_next);
  return helmholtz_solve(1.0 / dt, m.kappa, rhs);
}

MacVelocity project(const MacVelocity& u_star) {
  const ScalarField psi = poisson_neumann(divergence(u_star));
  MacVelocity u = u_star;
  u.axpy(-1.0, face_gradient(psi));
  u.apply_no_penetration();
  return u;
}

MacVelocity step_ns(const SimState& s, const ScalarField& phi_next, const ScalarField& theta_next,
                    const ScalarField& mu, double dt, const Model& model, const MacVelocity& q) {
  const Grid& g = s.grid();
  const MaterialParams& m = model.material();
  const double nu_bar = m.nu_bar();

  MacVelocity rhs = s.u;
  rhs *= 1.0 / dt;
  rhs.axpy(-1.0, advect_momentum(s.u, s.u));

  if (m.nu_max > m.nu_min) {
    ScalarField excess(g);
    for (std::size_t k = 0; k < excess.size(); ++k) excess[k] = viscosity(m, phi_next[k]) - nu_bar;
    rhs += stress_divergence(s.u, excess, cell_to_node(excess));
  }

  // Korteweg force in potential form; phi^n is the field the CH step advected.
  ScalarField potential = mu;
  potential.axpy(-m.l_c, theta_next);
  const MacVelocity grad = face_gradient(potential);
  const MacVelocity phi_face = cell_to_face(s.phi);
  for (std::size_t k = 0; k < rhs.u_values().size(); ++k)
    rhs.u_values()[k] -= m.K_cap * phi_face.u_values()[k] * grad.u_values()[k];
  for (std::size_t k = 0; k < rhs.v_values().size(); ++k)
    rhs.v_values()[k] -= m.K_cap * phi_face.v_values()[k] * grad.v_values()[k];

  rhs += buoyancy(phi_next, theta_next, m);
  rhs += q;
  rhs.apply_no_penetration();
  // Projecting before the no-slip solve as well keeps gradient forces (e.g.
  // uniform gravity on a pure phase) from leaking into the velocity.
  return project(helmholtz_solve_velocity(1.0 / dt, nu_bar, project(rhs)));
}

SimState advance(const SimState& s, const Model& model, const Forcing& forcing, double dt, double* residual) {
  if (!(dt > 0.0)) throw Error("advance: dt must be positive");
  ChStep ch = step_ch(s, dt, model);
  ScalarField theta = step_heat(s, ch.phi, dt, model, forcing.z);
  MacVelocity u = step_ns(s, ch.phi, theta, ch.mu, dt, model, forcing.q);

  SimState next(s.grid());
  next.t = s.t + dt;
  next.step = s.step + 1;
  next.phi = std::move(ch.phi);
  next.theta = std::move(theta);
  next.u = std::move(u);
  next.mu = std::move(ch.mu);
  if (!next.all_finite()) {
    std::ostringstream msg;
    msg << "non-finite values at step " << next.step << " (t = " << next.t << ", dt = " << dt << ")";
    throw BlowUp(msg.str(), s);
  }
  if (model.config().check_invariants) {
    const double drift = std::abs(mean(next.phi) - mean(s.phi));
    const double div = max_abs(divergence(next.u));
    if (drift > 1e-10 || div > 1e-10) {
      std::ostringstream msg;
      msg << "invariant violated at step " << next.step << ": mass drift " << drift << ", max|div u| " << div;
      throw Error(msg.str());
    }
  }
  if (residual) *residual = energy_budget_residual(s, next, next.mu, dt, forcing, model.energy_model());
  return next;
}

double suggest_dt(const SimState& s, const Model& model) {
  const Grid& g = s.grid();
  const MaterialParams& m = model.material();
  const double h = std::min(g.dx(), g.dy());
  double dt = std::numeric_limits<double>::infinity();
  if (const double umax = s.u.max_abs(); umax > 0.0) dt = std::min(dt, h / umax);
  if (m.nu_max > m.nu_min) dt = std::min(dt, h * h / (4.0 * (m.nu_max - m.nu_min)));
  if (model.mode() == Mode::kNonlocal)
    dt = std::min(dt, 1.0 / model.a()->max());
  else
    dt = std::min(dt, 1.0 / (2.0 * (model.stabilization() - 1.0) + 1.0));
  return dt * model.config().safety;
}

}  // namespace nlchb
