#include "nlchb/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nlchb/spectral.hpp"

namespace nlchb {

void PotentialParams::validate() const {
  if (!(eta_F > 0.0)) throw Error("potential: eta_F must be positive");
  const int d = degree();
  if (d < 2 || d % 2 != 0) throw Error("potential: degree must be even and at least 2");
  if (!(coeffs[static_cast<std::size_t>(d)] > 0.0)) throw Error("potential: leading coefficient must be positive");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw Error("potential: non-finite coefficient");
}

int PotentialParams::degree() const {
  int d = static_cast<int>(coeffs.size()) - 1;
  while (d > 0 && coeffs[static_cast<std::size_t>(d)] == 0.0) --d;
  return d;
}

PotentialValue potential_eval(const PotentialParams& p, double s) {
  // Horner for F, F', F'' together.
  double f = 0.0, df = 0.0, ddf = 0.0;
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) {
    ddf = ddf * s + 2.0 * df;
    df = df * s + f;
    f = f * s + *it;
  }
  return {f, df, ddf};
}

void MaterialParams::validate() const {
  std::ostringstream msg;
  if (!(K_cap > 0.0)) msg << "K_cap must be positive; ";
  if (!(l_c > 0.0)) msg << "l_c must be positive; ";
  if (!(l_h > 0.0)) msg << "l_h must be positive; ";
  if (!(kappa > 0.0)) msg << "kappa must be positive; ";
  if (!(nu_min > 0.0 && nu_min <= nu_max)) msg << "need 0 < nu_min <= nu_max; ";
  if (!std::isfinite(alpha0) || !std::isfinite(alpha1) || !std::isfinite(alpha2) || !std::isfinite(g[0]) ||
      !std::isfinite(g[1]))
    msg << "non-finite Boussinesq parameters; ";
  if (!msg.str().empty()) throw Error("material: " + msg.str());
}

double viscosity(const MaterialParams& m, double s) {
  return m.nu_min + (m.nu_max - m.nu_min) * 0.5 * (1.0 + std::tanh(s));
}

MacVelocity buoyancy(const ScalarField& phi, const ScalarField& theta, const MaterialParams& m) {
  require_same_grid(phi.grid(), theta.grid(), "buoyancy");
  const Grid& g = phi.grid();
  auto ell = [&](int i, int j) { return m.alpha0 + m.alpha1 * phi(i, j) + m.alpha2 * theta(i, j); };
  MacVelocity f(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx(); ++i) f.u(i, j) = 0.5 * (ell(i - 1, j) + ell(i, j)) * m.g[0];
  for (int j = 1; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) f.v(i, j) = 0.5 * (ell(i, j - 1) + ell(i, j)) * m.g[1];
  return f;
}

namespace {

ScalarField local_part(const ScalarField& phi, const ScalarField& theta, const PotentialParams& pot,
                       const MaterialParams& mat) {
  ScalarField out(phi.grid());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = pot.eta_F * potential_eval(pot, phi[k]).dF + mat.l_c * theta[k];
  return out;
}

}  // namespace

ScalarField mu_nonlocal(const ScalarField& phi, const ScalarField& theta, const KernelGrid& kernel,
                        const CoefficientA& a, const PotentialParams& pot, const MaterialParams& mat) {
  require_same_grid(phi.grid(), theta.grid(), "mu_nonlocal");
  require_same_grid(phi.grid(), kernel.grid(), "mu_nonlocal");
  require_same_grid(phi.grid(), a.grid(), "mu_nonlocal");
  const ScalarField jp = convolve(kernel, phi);
  ScalarField out = local_part(phi, theta, pot, mat);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += a.values()[k] * phi[k] - jp[k];
  return out;
}

ScalarField mu_local(const ScalarField& phi, const ScalarField& theta, const PotentialParams& pot,
                     const MaterialParams& mat) {
  require_same_grid(phi.grid(), theta.grid(), "mu_local");
  ScalarField out = local_part(phi, theta, pot, mat);
  out -= laplacian_neumann(phi);
  return out;
}

namespace {

std::string fmt(const char* label, double value) {
  std::ostringstream s;
  s << label << value;
  return s.str();
}

// sup over R of c1 s^2 - Fe(s) for a potential that eventually dominates c1 s^2.
double sup_quadratic_gap(const PotentialParams& pot, double c1) {
  auto gap = [&](double s) { return c1 * s * s - pot.eta_F * potential_eval(pot, s).F; };
  // Grow R until the gap is negative and decreasing on both sides.
  double r = 4.0;
  for (int it = 0; it < 200; ++it) {
    const bool right = gap(r) < 0.0 && gap(1.01 * r) < gap(r);
    const bool left = gap(-r) < 0.0 && gap(-1.01 * r) < gap(-r);
    if (right && left) break;
    r *= 2.0;
  }
  const int n = 200000;
  double best = -std::numeric_limits<double>::infinity(), arg = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double s = -r + 2.0 * r * k / n;
    if (const double v = gap(s); v > best) best = v, arg = s;
  }
  // golden-section polish around the best sample
  double lo = arg - 2.0 * r / n, hi = arg + 2.0 * r / n;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 80; ++it) {
    const double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
    if (gap(m1) > gap(m2))
      hi = m2;
    else
      lo = m1;
  }
  return std::max(best, gap(0.5 * (lo + hi)));
}

}  // namespace

ValidationReport validate_assumptions(const KernelGrid* kernel, const CoefficientA* a, const PotentialParams& pot,
                                      const MaterialParams& mat, double s_max) {
  ValidationReport r;
  r.s_min = -s_max;
  r.s_max = s_max;
  if (!(s_max >= 2.0)) r.flags.push_back(fmt("s_range half-width must be >= 2, got ", s_max));

  // (A1)
  if (kernel && a) {
    const Grid& g = kernel->grid();
    r.kernel_symmetric = true;
    r.kernel_nonnegative = true;
    for (int n = -(g.ny() - 1); n < g.ny(); ++n)
      for (int m = -(g.nx() - 1); m < g.nx(); ++m) {
        const double v = kernel->at(m, n);
        if (v != kernel->at(-m, -n)) r.kernel_symmetric = false;
        if (!(v >= 0.0)) r.kernel_nonnegative = false;
      }
    const KernelNorms norms = kernel_norms(*kernel);
    r.kernel_l1 = norms.l1;
    r.kernel_grad_l1 = norms.grad_l1;
    r.a_min = a->min();
    r.a_max = a->max();
    r.a1_ok = r.kernel_symmetric && r.kernel_nonnegative && std::isfinite(norms.l1) &&
              std::isfinite(norms.grad_l1) && r.a_min >= 0.0;
    if (!r.a1_ok) r.flags.push_back("(A1) kernel not symmetric/nonnegative/W^{1,1}, or a < 0");
  } else {
    r.a1_ok = true;  // local mode: no kernel
  }

  // (A2)
  {
    r.nu_sample_min = std::numeric_limits<double>::infinity();
    r.nu_sample_max = -std::numeric_limits<double>::infinity();
    const double lim = std::max(10.0, s_max);
    for (int k = 0; k <= 4000; ++k) {
      const double nu = viscosity(mat, -lim + 2.0 * lim * k / 4000);
      r.nu_sample_min = std::min(r.nu_sample_min, nu);
      r.nu_sample_max = std::max(r.nu_sample_max, nu);
    }
    r.a2_ok = mat.nu_min > 0.0 && r.nu_sample_min >= mat.nu_min && r.nu_sample_max <= mat.nu_max;
    if (!r.a2_ok) r.flags.push_back("(A2) viscosity samples leave [nu_min, nu_max]");
  }

  // Dense scan of the potential on s_range.
  const int ns = 6001;
  std::vector<double> s(ns);
  std::vector<PotentialValue> fv(ns);
  for (int k = 0; k < ns; ++k) {
    s[k] = -s_max + 2.0 * s_max * k / (ns - 1);
    const PotentialValue v = potential_eval(pot, s[k]);
    fv[k] = {pot.eta_F * v.F, pot.eta_F * v.dF, pot.eta_F * v.ddF};
  }

  // (A3)
  r.min_ddF = std::numeric_limits<double>::infinity();
  for (const auto& v : fv) r.min_ddF = std::min(r.min_ddF, v.ddF);
  r.c0 = r.min_ddF + ((kernel && a) ? r.a_min : 0.0);
  r.a3_ok = r.c0 > 0.0;
  if (!r.a3_ok) r.flags.push_back(fmt("(A3) c0 = min(F'' + a) = ", r.c0) + " <= 0");

  // (A4)
  const int deg = pot.degree();
  const double lead = pot.eta_F * pot.coeffs[static_cast<std::size_t>(std::max(deg, 0))];
  r.half_l1 = 0.5 * r.kernel_l1;
  bool feasible = deg >= 4 || (deg == 2 && lead > r.half_l1);
  if (deg >= 4)
    r.c1 = std::max(r.half_l1 * (1.0 + 1e-2) + 1e-12, 0.5 * lead);
  else if (deg == 2)
    r.c1 = feasible ? 0.5 * (r.half_l1 + lead) : r.half_l1;
  if (feasible) {
    r.c2 = sup_quadratic_gap(pot, r.c1);
    const double tol = 1e-10 * std::max(1.0, std::abs(r.c2));
    for (int k = 0; k < ns; ++k)
      if (fv[k].F < r.c1 * s[k] * s[k] - r.c2 - tol) ++r.a4_violations;
  }
  r.a4_ok = feasible && r.c1 > r.half_l1 && r.a4_violations == 0;
  if (!r.a4_ok)
    r.flags.push_back(fmt("(A4) no c1 > ||J||_1/2 = ", r.half_l1) + fmt(" found; c1 = ", r.c1));

  // (A5) with p = 2: c3 = max F'^2/(|F| + 1), c4 = c3 on the scanned range.
  r.p = 2.0;
  for (const auto& v : fv) r.c3 = std::max(r.c3, v.dF * v.dF / (std::abs(v.F) + 1.0));
  r.c3 = std::max(r.c3, 1e-300);
  r.c4 = r.c3;
  // verify on a finer, shifted sample
  for (int k = 0; k < 4 * ns; ++k) {
    const double t = -s_max + 2.0 * s_max * (k + 0.37) / (4 * ns);
    const PotentialValue v = potential_eval(pot, t);
    const double lhs = std::pow(std::abs(pot.eta_F * v.dF), r.p);
    if (lhs > r.c3 * std::abs(pot.eta_F * v.F) + r.c4 + 1e-12 * (1.0 + lhs)) ++r.a5_violations;
  }
  r.a5_ok = r.a5_violations == 0;
  // |F'|^p ~ s^{p(deg-1)} must not outgrow |F| ~ s^deg.
  r.a5_global = deg >= 2 && r.p * (deg - 1) <= deg;
  if (!r.a5_ok) r.flags.push_back("(A5) |F'|^2 <= c3|F| + c4 violated on s_range");

  r.a6_ok = true;  // forcings are field-valued L^2 data by construction
  return r;
}

}  // namespace nlchb
