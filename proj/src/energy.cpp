#include "nlchb/energy.hpp"

#include <cmath>

#include "nlchb/mac.hpp"

namespace nlchb {

double e_nl(const KernelGrid& kernel, const CoefficientA& a, const ScalarField& phi) {
  require_same_grid(kernel.grid(), phi.grid(), "e_nl");
  require_same_grid(a.grid(), phi.grid(), "e_nl");
  // The form annihilates constants; shifting by one sample makes that exact
  // in floating point and reduces cancellation.
  ScalarField p = phi;
  const double shift = phi[0];
  for (double& v : p.values()) v -= shift;
  ScalarField ap = p;
  for (std::size_t k = 0; k < ap.size(); ++k) ap[k] *= a.values()[k];
  return inner(ap, p) - inner(p, convolve(kernel, p));
}

double e_nl_direct(const KernelGrid& kernel, const ScalarField& phi) {
  require_same_grid(kernel.grid(), phi.grid(), "e_nl_direct");
  const Grid& g = phi.grid();
  if (g.size() > 4096) throw Error("e_nl_direct: grid larger than 4096 cells");
  const int nx = g.nx(), ny = g.ny();
  double s = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      for (int jj = 0; jj < ny; ++jj)
        for (int ii = 0; ii < nx; ++ii) {
          const double d = phi(i, j) - phi(ii, jj);
          s += kernel.at(i - ii, j - jj) * d * d;
        }
  const double w = g.cell_area();
  return 0.5 * s * w * w;
}

double e_local(const ScalarField& phi) { return 0.5 * compact_dirichlet(phi); }

EnergyParts energy_parts(const SimState& s, const EnergyModel& m) {
  if (!m.potential || !m.material) throw Error("energy: potential and material parameters are required");
  const MaterialParams& mat = *m.material;
  EnergyParts e{};
  if (m.mode == Mode::kNonlocal) {
    if (!m.kernel || !m.a) throw Error("energy: nonlocal mode needs a kernel and a(x)");
    e.interface = e_nl(*m.kernel, *m.a, s.phi);
  } else {
    e.interface = e_local(s.phi);
  }
  ScalarField F(s.grid());
  for (std::size_t k = 0; k < F.size(); ++k) F[k] = m.potential->eta_F * potential_eval(*m.potential, s.phi[k]).F;
  e.F_integral = integral(F);
  e.kinetic = inner(s.u, s.u) / (2.0 * mat.K_cap * mat.l_c);
  e.thermal = inner(s.theta, s.theta) / (2.0 * mat.l_h);
  const double phase = m.mode == Mode::kNonlocal ? (e.interface + 2.0 * e.F_integral) / mat.l_c
                                                 : (e.interface + e.F_integral) / mat.l_c;
  e.total = 0.5 * phase + e.kinetic + e.thermal;
  return e;
}

double total_energy(const SimState& state, const EnergyModel& model) { return energy_parts(state, model).total; }

DissipationParts dissipation(const SimState& s, const ScalarField& mu, const MaterialParams& mat) {
  DissipationParts d{};
  d.chemical = compact_dirichlet(mu) / mat.l_c;
  ScalarField nu(s.grid());
  for (std::size_t k = 0; k < nu.size(); ++k) nu[k] = viscosity(mat, s.phi[k]);
  d.viscous = 2.0 * strain_norm_sq(s.u, nu, cell_to_node(nu)) / (mat.K_cap * mat.l_c);
  d.thermal = mat.kappa * compact_dirichlet(s.theta) / mat.l_h;
  d.total = d.chemical + d.viscous + d.thermal;
  return d;
}

WorkTerms work_terms(const SimState& s, const Forcing& f, const MaterialParams& mat) {
  WorkTerms w{};
  const double ku = 1.0 / (mat.K_cap * mat.l_c);
  w.q = ku * inner(f.q, s.u);
  w.buoy = ku * inner(buoyancy(s.phi, s.theta, mat), s.u);
  w.z = inner(f.z, s.theta) / mat.l_h;
  const auto [cu, cv] = face_to_cell(s.u);
  ScalarField gu = mat.g[0] * cu;
  gu.axpy(mat.g[1], cv);
  w.gu = inner(gu, s.theta) / mat.l_h;
  return w;
}

double energy_budget_residual(const SimState& prev, const SimState& next, const ScalarField& mu_used, double dt,
                              const Forcing& forcing, const EnergyModel& model) {
  if (dt == 0.0) return 0.0;
  const double de = total_energy(next, model) - total_energy(prev, model);
  return de + dt * dissipation(next, mu_used, *model.material).total -
         dt * work_terms(next, forcing, *model.material).total();
}

const std::vector<std::string>& ledger_columns() {
  static const std::vector<std::string> cols{"t",         "E_total",  "E_interface", "F_integral", "kinetic",
                                             "thermal",   "dissipation", "work_q",   "work_buoy",  "work_z",
                                             "work_gu",   "residual", "mass_phi",    "mean_h",     "max_div_u",
                                             "max_u",     "dt_used"};
  return cols;
}

std::vector<double> ledger_values(const LedgerRow& r) {
  return {r.t,       r.E_total, r.E_interface, r.F_integral, r.kinetic,   r.thermal, r.dissipation, r.work_q, r.work_buoy,
          r.work_z,  r.work_gu, r.residual,    r.mass_phi,   r.mean_h,    r.max_div_u, r.max_u,     r.dt_used};
}

void EnergyLedger::append(const LedgerRow& row) {
  if (!rows_.empty() && !(row.t > rows_.back().t)) throw Error("ledger: time must increase strictly");
  for (double v : ledger_values(row))
    if (!std::isfinite(v)) throw Error("ledger: non-finite entry");
  rows_.push_back(row);
}

LedgerRow make_ledger_row(const SimState& s, const ScalarField& mu, const Forcing& forcing, const EnergyModel& model,
                          double residual, double dt) {
  const EnergyParts e = energy_parts(s, model);
  const DissipationParts d = dissipation(s, mu, *model.material);
  const WorkTerms w = work_terms(s, forcing, *model.material);
  ScalarField h = s.theta;
  h.axpy(-model.material->l_h, s.phi);
  return LedgerRow{s.t,       e.total,   e.interface, e.F_integral,
                   e.kinetic, e.thermal, d.total,     w.q,
                   w.buoy,    w.z,       w.gu,        residual,
                   mean(s.phi), mean(h), max_abs(divergence(s.u)), s.u.max_abs(),
                   dt};
}

}  // namespace nlchb
