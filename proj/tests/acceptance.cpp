// Acceptance checks, one per process invocation (`acceptance --criterion N`).
// Every check prints exactly one "[PASS]" / "[FAIL]" line followed by
// indented detail lines. Exit codes: 0 pass, 1 fail, 77 fail of a check
// registered with --allow-fail (known unattainable, see README).

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "nlchb/commands.hpp"
#include "nlchb/energy.hpp"
#include "nlchb/io.hpp"
#include "nlchb/kernel.hpp"
#include "nlchb/limits.hpp"
#include "nlchb/physics.hpp"
#include "nlchb/solver.hpp"

using namespace nlchb;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int worker_threads() {
  return static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 4u));
}

ScalarField random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField f(g);
  for (double& x : f.values()) x = dist(rng);
  return f;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

double l2(const ScalarField& f) { return std::sqrt(inner(f, f)); }

/// The spinodal fixture: 64^2 unit square, default material and potential,
/// bump kernel with eps = 0.1, gamma = 0.5, phi0 a low-mode perturbation of 0.
struct Fixture {
  Grid grid = Grid::make(64, 64, 1.0, 1.0);
  MaterialParams material;
  PotentialParams potential;
  SolverConfig solver;

  Model model() const { return Model(grid, material, potential, solver); }
  SimState initial() const { return spinodal_state(grid, 0.2, 0.0); }
};

Fixture unforced_fixture() {
  Fixture f;
  f.material.g = {0.0, 0.0};
  return f;
}

// --- 1 ---------------------------------------------------------------------

Outcome convolution_oracle() {
  Stopwatch clock;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> eps_dist(0.1, 0.6), gamma_dist(0.05, 0.95);
  const int sizes[] = {8, 16, 32};
  double worst = 0.0;
  Outcome out;
  for (int k = 0; k < 20; ++k) {
    const int n = sizes[k % 3];
    const Grid g = Grid::make(n, n, 1.0, 1.0);
    const double eps = eps_dist(rng), gamma = gamma_dist(rng);
    const MollifierShape shape = k % 2 ? MollifierShape::kQuartic : MollifierShape::kBump;
    const KernelGrid kernel(g, calibrate_mollifier(gamma, 2, shape), eps);
    const ScalarField phi = random_field(g, rng);
    const ScalarField direct = convolve_direct(kernel, phi);
    double scale = 0.0;
    for (double v : direct.values()) scale = std::max(scale, std::abs(v));
    const double rel = max_abs_diff(convolve(kernel, phi), direct) / scale;
    worst = std::max(worst, rel);
    out.details.push_back(fmt("case %2d: %2dx%-2d eps %.4f gamma %.4f %-7s rel %.2e", k, n, n, eps, gamma,
                              to_string(shape).c_str(), rel));
  }
  const double secs = clock.seconds();
  out.pass = worst <= 1e-12 && secs < 10.0;
  out.summary = fmt("20 cases on 8^2/16^2/32^2, max relative error %.2e (tol 1e-12), %.2f s (limit 10 s)", worst,
                    secs);
  return out;
}

// --- 2 ---------------------------------------------------------------------

Outcome energy_identity() {
  std::mt19937_64 rng(7);
  struct Case {
    int nx, ny;
    double lx, ly, eps, gamma;
  };
  const Case cases[] = {{8, 8, 1.0, 1.0, 0.3, 0.5},   {16, 16, 1.0, 1.0, 0.2, 0.25},
                        {32, 32, 1.0, 1.0, 0.1, 0.5}, {32, 32, 1.0, 1.0, 0.3, 0.9},
                        {24, 16, 1.5, 1.0, 0.25, 0.7}, {32, 32, 2.0, 2.0, 0.5, 0.1}};
  double worst = 0.0;
  Outcome out;
  for (const Case& c : cases) {
    const Grid g = Grid::make(c.nx, c.ny, c.lx, c.ly);
    const KernelGrid kernel(g, calibrate_mollifier(c.gamma, 2), c.eps);
    const CoefficientA a = compute_a(kernel);
    for (int rep = 0; rep < 2; ++rep) {
      ScalarField phi = random_field(g, rng);
      if (rep == 1)  // smooth field plus an offset: cancellation-prone
        phi = ScalarField::from_function(g, [](double x, double y) { return 3.0 + 0.1 * std::cos(pi * x) * y; });
      const double fast = e_nl(kernel, a, phi), direct = e_nl_direct(kernel, phi);
      const double rel = std::abs(fast - direct) / std::abs(direct);
      worst = std::max(worst, rel);
      out.details.push_back(fmt("%2dx%-2d eps %.2f gamma %.2f %-6s: identity %.12e direct %.12e rel %.2e", c.nx, c.ny,
                                c.eps, c.gamma, rep ? "smooth" : "random", fast, direct, rel));
    }
  }
  out.pass = worst <= 1e-10;
  out.summary = fmt("(a phi, phi) - (phi, J*phi) vs direct double sum, max relative error %.2e (tol 1e-10)", worst);
  return out;
}

// --- 3 ---------------------------------------------------------------------

Outcome adjoint_symmetry() {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  Outcome out;
  for (int n : {8, 16, 32, 48}) {
    const Grid g = Grid::make(n, n + 4, 1.0, 1.25);
    for (MollifierShape shape : {MollifierShape::kBump, MollifierShape::kQuartic}) {
      const KernelGrid kernel(g, calibrate_mollifier(0.5, 2, shape), 0.2);
      const ScalarField p1 = random_field(g, rng), p2 = random_field(g, rng);
      const double s12 = inner(p1, convolve(kernel, p2)), s21 = inner(p2, convolve(kernel, p1));
      // Young's inequality bounds |(p1, J*p2)| by this scale
      const double scale = l2(p1) * l2(p2) * kernel_norms(kernel).l1;
      const double rel = std::abs(s12 - s21) / scale;
      worst = std::max(worst, rel);
      out.details.push_back(fmt("%2dx%-2d %-7s: (p1,J*p2) %.15e (p2,J*p1) %.15e defect %.2e", n, n + 4,
                                to_string(shape).c_str(), s12, s21, rel));
    }
  }
  out.pass = worst <= 1e-12;
  out.summary = fmt("max |(p1,J*p2) - (p2,J*p1)| / (|p1| |p2| |J|_1) = %.2e (tol 1e-12)", worst);
  return out;
}

// --- 4 ---------------------------------------------------------------------

Outcome renormalization() {
  Outcome out;
  const double c2 = compute_cd(2), c3 = compute_cd(3);
  const double e2 = std::abs(c2 - pi), e3 = std::abs(c3 - 4.0 * pi / 3.0);
  out.details.push_back(fmt("C_2 = %.16f, |C_2 - pi| = %.2e (tol 1e-8)", c2, e2));
  out.details.push_back(fmt("C_3 = %.16f, |C_3 - 4pi/3| = %.2e (tol 1e-6)", c3, e3));
  double worst = 0.0;
  struct Case {
    int d;
    double gamma;
  };
  const Case cases[] = {{2, 0.05}, {2, 0.25}, {2, 0.5}, {2, 0.75}, {2, 0.95}, {3, 0.25}, {3, 1.0}, {3, 1.75}};
  for (const Case& c : cases)
    for (MollifierShape shape : {MollifierShape::kBump, MollifierShape::kQuartic}) {
      const Mollifier m = calibrate_mollifier(c.gamma, c.d, shape);
      const double target = 2.0 / compute_cd(c.d);
      const double res = std::abs(renormalization_integral(m) - target) / target;
      worst = std::max(worst, res);
      out.details.push_back(fmt("d=%d gamma %.2f %-7s: c_eta %.12e residual %.2e", c.d, c.gamma,
                                to_string(shape).c_str(), m.c_eta, res));
    }
  out.pass = e2 <= 1e-8 && e3 <= 1e-6 && worst <= 1e-8;
  out.summary = fmt("|C_2-pi| %.1e, |C_3-4pi/3| %.1e, max calibration residual %.1e (tol 1e-8)", e2, e3, worst);
  return out;
}

// --- 5, 6 ------------------------------------------------------------------

struct LongRun {
  double mass_drift = 0.0;
  double max_div = 0.0;
  double seconds = 0.0;
  double dt = 0.0;
  double final_max_u = 0.0;
  bool blew_up = false;
};

LongRun long_spinodal_run() {
  const Fixture f;
  const Model model = f.model();
  SimState s = f.initial();
  LongRun r;
  r.dt = suggest_dt(s, model);
  const double m0 = mean(s.phi);
  const Forcing zero(f.grid);
  Stopwatch clock;
  try {
    for (int n = 0; n < 10000; ++n) {
      s = advance(s, model, zero, r.dt);
      r.mass_drift = std::max(r.mass_drift, std::abs(mean(s.phi) - m0));
      r.max_div = std::max(r.max_div, max_abs(divergence(s.u)));
    }
  } catch (const BlowUp&) {
    r.blew_up = true;
  }
  r.seconds = clock.seconds();
  r.final_max_u = s.u.max_abs();
  return r;
}

Outcome mass_conservation() {
  const LongRun r = long_spinodal_run();
  Outcome out;
  out.pass = !r.blew_up && r.mass_drift <= 1e-10 && r.seconds < 120.0;
  out.summary = fmt("10^4 steps at 64^2 (dt %.3e): max |mean phi - mean phi0| = %.2e (tol 1e-10), %.1f s (limit "
                    "120 s)",
                    r.dt, r.mass_drift, r.seconds);
  out.details.push_back(fmt("final max|u| %.3e%s", r.final_max_u, r.blew_up ? " (blew up)" : ""));
  return out;
}

Outcome incompressibility() {
  const LongRun r = long_spinodal_run();
  Outcome out;
  out.pass = !r.blew_up && r.max_div <= 1e-10;
  out.summary = fmt("10^4 steps at 64^2: max over steps of max|div u| = %.2e (tol 1e-10)", r.max_div);
  out.details.push_back(fmt("final max|u| %.3e, buoyancy active (g = (0,-1))", r.final_max_u));
  return out;
}

// --- 7 ---------------------------------------------------------------------

struct EnergyRun {
  double e0 = 0.0;
  double worst_increase = 0.0;  ///< max over steps of E(n+1) - E(n)
  double positive = 0.0;        ///< sum of max(r, 0)
  double absolute = 0.0;        ///< sum of |r|
  int steps = 0;
};

EnergyRun energy_run(const Fixture& f, double dt, int steps) {
  const Model model = f.model();
  const EnergyModel em = model.energy_model();
  const Forcing zero(f.grid);
  SimState s = f.initial();
  EnergyRun r;
  r.e0 = total_energy(s, em);
  r.steps = steps;
  double prev = r.e0;
  r.worst_increase = -std::numeric_limits<double>::infinity();
  for (int n = 0; n < steps; ++n) {
    double res = 0.0;
    s = advance(s, model, zero, dt, &res);
    const double e = total_energy(s, em);
    r.worst_increase = std::max(r.worst_increase, e - prev);
    prev = e;
    r.positive += std::max(res, 0.0);
    r.absolute += std::abs(res);
  }
  return r;
}

Outcome energy_law() {
  const Fixture f = unforced_fixture();
  const double dt = suggest_dt(f.initial(), f.model());
  const int steps = 400;
  const EnergyRun full = energy_run(f, dt, steps);
  const EnergyRun half = energy_run(f, dt / 2, 2 * steps);
  Outcome out;
  const double tol = 1e-8 * full.e0;
  const bool monotone = full.worst_increase <= tol && half.worst_increase <= tol;
  // Positive residual sums at round-off level cannot be compared by ratio;
  // that floor is a few ulps of E per step.
  const double floor = 8.0 * std::numeric_limits<double>::epsilon() * full.e0 * half.steps;
  const bool halving = half.positive <= floor || 1.8 * half.positive <= full.positive;
  out.pass = monotone && halving;
  out.summary = fmt("max step increase %.2e, %.2e (tol %.2e); positive residual sums %.3e -> %.3e (need >= 1.8x "
                    "reduction or <= round-off %.1e)",
                    full.worst_increase, half.worst_increase, tol, full.positive, half.positive, floor);
  out.details.push_back(fmt("dt %.4e suggested, T = %.4f, E(0) = %.12e", dt, dt * steps, full.e0));
  out.details.push_back(fmt("numerical dissipation sum |r|: %.6e -> %.6e, ratio %.3f (first order: ~2)",
                            full.absolute, half.absolute, full.absolute / half.absolute));
  return out;
}

// --- 8 ---------------------------------------------------------------------

Outcome heat_balance() {
  Fixture f = unforced_fixture();
  f.grid = Grid::make(48, 40, 1.0, 0.8);
  f.material.l_h = 0.7;
  f.material.kappa = 0.3;
  const Model model = f.model();
  SimState s = f.initial();
  s.theta = ScalarField::from_function(f.grid, [](double x, double y) { return 0.1 + 0.3 * std::cos(pi * x) * y; });
  const ScalarField z(f.grid);
  const double dt = suggest_dt(s, model);
  auto balance = [&](const SimState& st) { return mean(st.theta) - f.material.l_h * mean(st.phi); };
  double prev = balance(s), worst = 0.0;
  const double b0 = prev;
  for (int n = 0; n < 500; ++n) {
    const ChStep ch = step_ch(s, dt, model);
    ScalarField theta = step_heat(s, ch.phi, dt, model, z);
    s.phi = ch.phi;
    s.mu = ch.mu;
    s.theta = std::move(theta);
    const double b = balance(s);
    worst = std::max(worst, std::abs(b - prev));
    prev = b;
  }
  Outcome out;
  out.pass = worst <= 1e-12;
  out.summary = fmt("u = 0, g = 0, z = 0, 500 steps: max per-step drift of mean(theta - l_h phi) = %.2e (tol 1e-12)",
                    worst);
  out.details.push_back(fmt("l_h %.2f, dt %.3e, mean(theta - l_h phi) %.15f -> %.15f", f.material.l_h, dt, b0, prev));
  return out;
}

// --- 9 ---------------------------------------------------------------------

SimState smooth_state(const Grid& g) {
  SimState s(g);
  s.phi = ScalarField::from_function(g, [](double x, double y) { return 0.4 * std::cos(pi * x) * std::cos(pi * y); });
  s.theta = ScalarField::from_function(g, [](double x, double) { return 0.2 * std::cos(pi * x); });
  // stream function sin^2(pi x) sin^2(pi y) at the nodes: discretely divergence free
  auto psi = [](double x, double y) { return std::pow(std::sin(pi * x) * std::sin(pi * y), 2); };
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i <= g.nx(); ++i)
      s.u.u(i, j) = (psi(i * g.dx(), (j + 1) * g.dy()) - psi(i * g.dx(), j * g.dy())) / g.dy();
  for (int j = 0; j <= g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      s.u.v(i, j) = -(psi((i + 1) * g.dx(), j * g.dy()) - psi(i * g.dx(), j * g.dy())) / g.dx();
  return s;
}

double state_distance(const SimState& a, const SimState& b) {
  const double dp = l2(a.phi - b.phi), dt = l2(a.theta - b.theta);
  MacVelocity du = a.u;
  du.axpy(-1.0, b.u);
  return std::sqrt(dp * dp + dt * dt + inner(du, du));
}

Outcome time_order() {
  Fixture f = unforced_fixture();
  f.grid = Grid::make(32, 32, 1.0, 1.0);
  f.solver.epsilon = 0.2;
  const Model model = f.model();
  const Forcing zero(f.grid);
  const double T = 0.02;
  const int base = 64;  // steps at dt = h
  auto run = [&](int steps) {
    SimState s = smooth_state(f.grid);
    for (int n = 0; n < steps; ++n) s = advance(s, model, zero, T / steps);
    return s;
  };
  const SimState s4 = run(base / 4), s2 = run(base / 2), s1 = run(base);
  const double d42 = state_distance(s4, s2), d21 = state_distance(s2, s1);
  const double order = std::log2(d42 / d21);
  Outcome out;
  out.pass = order >= 0.8 && order <= 1.2;
  out.summary = fmt("Richardson with h = %.3e: |X(4h)-X(2h)| %.3e, |X(2h)-X(h)| %.3e, observed order %.3f (need "
                    "[0.8, 1.2])",
                    T / base, d42, d21, order);
  out.details.push_back(fmt("smooth state, 32^2, eps 0.2, T = %.3f, stiffness-suggested dt %.3e", T,
                            suggest_dt(smooth_state(f.grid), model)));
  return out;
}

// --- 10, 11 ----------------------------------------------------------------

const std::vector<double> kLimitEps{0.2, 0.1, 0.05, 0.025};

ScalarField limit_fixture() {
  const Grid g = Grid::make(128, 128, 1.0, 1.0);
  return ScalarField::from_function(g, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); });
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

std::string join(const std::vector<double>& v, const char* f = "%.4e") {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ", ") + fmt(f, x);
  return s;
}

Outcome limit_check(const std::vector<double>& values, const std::vector<double>& dirichlet,
                    const std::vector<double>& moments, double secs, const char* what, bool timed) {
  const double target = pi * pi / 4.0;
  std::vector<double> err, alt;
  for (std::size_t k = 0; k < values.size(); ++k) {
    err.push_back(std::abs(values[k] - target));
    alt.push_back(std::abs(values[k] - dirichlet[k]));
  }
  Outcome out;
  const double final_rel = err.back() / target;
  out.pass = strictly_decreasing(err) && final_rel <= 0.05 && (!timed || secs < 60.0);
  out.summary = fmt("%s on 128^2, eps 0.2..0.025: |value - pi^2/4| = [%s], strictly decreasing: %s, final %.1f%% "
                    "(need <= 5%%)%s",
                    what, join(err).c_str(), strictly_decreasing(err) ? "yes" : "no", 100.0 * final_rel,
                    timed ? fmt(", %.1f s (limit 60 s)", secs).c_str() : "");
  out.details.push_back("values: [" + join(values, "%.6f") + "], pi^2/4 = " + fmt("%.6f", target));
  out.details.push_back("supplementary: the form tends to int |grad phi|^2 = pi^2/2 for a kernel with second moment 2");
  out.details.push_back("  discrete int |grad phi|^2: [" + join(dirichlet, "%.6f") + "]");
  out.details.push_back("  |value - int |grad phi|^2|: [" + join(alt) + "], final " +
                        fmt("%.2f%%", 100.0 * alt.back() / dirichlet.back()));
  out.details.push_back("  discrete second moments: [" + join(moments, "%.4f") + "] (continuum value 2)");
  return out;
}

Outcome gamma_limit() {
  Stopwatch clock;
  const SweepReport r = gamma_sweep(limit_fixture(), kLimitEps, 0.5, MollifierShape::kBump, worker_threads());
  return limit_check(r.column("E_nl"), r.column("grad_sq"), r.column("second_moment"), clock.seconds(),
                     "nonlocal energy", true);
}

Outcome weak_limit() {
  const ScalarField phi = limit_fixture();
  Stopwatch clock;
  const SweepReport r = weak_operator_check(phi, phi, kLimitEps, 0.5, MollifierShape::kBump, worker_threads());
  Outcome out = limit_check(r.column("form"), r.column("target"), r.column("second_moment"), clock.seconds(),
                            "bilinear form", false);
  double sym = 0.0;
  for (double v : r.column("symmetry_defect")) sym = std::max(sym, v);
  out.details.push_back(fmt("  max |form - transposed form| %.2e", sym));
  return out;
}

// --- 12 --------------------------------------------------------------------

Outcome solution_convergence() {
  const Fixture f;
  SolutionSweepConfig c(f.grid);
  c.material = f.material;
  c.potential = f.potential;
  c.solver = f.solver;
  c.solver.t_end = 0.5;
  c.initial = f.initial();
  c.threads = worker_threads();
  const std::vector<double> eps{0.2, 0.1, 0.05};
  double dt = std::numeric_limits<double>::infinity();
  for (double e : eps) {
    SolverConfig sc = c.solver;
    sc.epsilon = e;
    dt = std::min(dt, suggest_dt(c.initial, Model(f.grid, f.material, f.potential, sc)));
  }
  c.solver.dt = c.solver.t_end / std::ceil(c.solver.t_end / dt);
  Stopwatch clock;
  const SweepReport r = solution_sweep(c, eps);
  const double secs = clock.seconds();

  bool all_valid = true;
  for (std::size_t k = 0; k < r.size(); ++k) all_valid = all_valid && r.valid(k);
  auto abs_col = [&](const std::string& name) {
    std::vector<double> v = r.column(name);
    for (double& x : v) x = std::abs(x);
    return v;
  };
  const bool phi_ok = r.strictly_decreasing("phi_L2I"), theta_ok = r.strictly_decreasing("theta_L2I"),
             u_ok = r.strictly_decreasing("u_L2I");
  const bool gap_ok = strictly_decreasing(abs_col("energy_gap"));
  Outcome out;
  out.pass = all_valid && phi_ok && theta_ok && u_ok && gap_ok && secs < 600.0;
  out.summary = fmt("64^2, T = 0.5, eps 0.2/0.1/0.05 vs local: L2(I;L2) distances decreasing phi %s theta %s u %s, "
                    "|energy gap| decreasing %s, %.0f s (limit 600 s)",
                    phi_ok ? "yes" : "no", theta_ok ? "yes" : "no", u_ok ? "yes" : "no", gap_ok ? "yes" : "no", secs);
  out.details.push_back(fmt("dt %.4e (smallest suggestion over the sweep), %d threads", c.solver.dt, c.threads));
  for (const char* col : {"phi_L2I", "theta_L2I", "u_L2I", "phi_end", "energy_gap", "natural_energy_gap"})
    out.details.push_back(fmt("%-19s [", col) + join(r.column(col), col[0] == 'e' ? "%.15e" : "%.6e") + "]");
  out.details.push_back("the literal local energy halves the interface and potential terms, so its gap stays near "
                        "|Omega|/(8 l_c); natural_energy_gap compares like with like");
  return out;
}

// --- 13 --------------------------------------------------------------------

bool same_bytes(const fs::path& a, const fs::path& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(fa), {}) == std::string(std::istreambuf_iterator<char>(fb), {});
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "nlchb_acceptance_restart";
  fs::remove_all(root);
  const std::string text =
      "seed = 5\n[grid]\nnx = 32\nny = 32\n[physics]\ng_y = -1\nnu_min = 0.05\nnu_max = 0.2\n"
      "[kernel]\nepsilon = 0.15\n[initial]\nnoise = 0.05\n[forcing]\nq = mode\nq_amplitude = 5\nz = mode\n"
      "[solver]\ndt = 0.001\nt_end = 0.06\ncadence = 20\n[output]\nformats = csv, snapshot\n";
  std::ostringstream log;
  Outcome out;
  const int full = cmd_run(parse_config(text), CommandEnv{(root / "full").string(), 1, &log});
  bool identical = full == kExitOk;
  for (const char* mid : {"snap_00000020.nlchb", "snap_00000040.nlchb"}) {
    const fs::path dir = root / (std::string("from_") + mid).substr(0, 19);
    const int rc = cmd_resume((root / "full" / mid).string(), CommandEnv{dir.string(), 1, &log});
    const Snapshot a = read_snapshot((root / "full" / "checkpoint.nlchb").string());
    const Snapshot b = read_snapshot((dir / "checkpoint.nlchb").string());
    const bool same = rc == kExitOk && a.state == b.state && same_bytes(root / "full" / "checkpoint.nlchb",
                                                                         dir / "checkpoint.nlchb");
    identical = identical && same;
    out.details.push_back(fmt("resume from %s: step %lld, state %s, checkpoint file %s", mid,
                              static_cast<long long>(b.state.step), a.state == b.state ? "identical" : "DIFFERENT",
                              same ? "byte-identical" : "differs"));
  }
  // library level: snapshot round trip in the middle of an in-memory trajectory
  const Fixture f;
  const Model model = f.model();
  const Forcing zero(f.grid);
  SimState a = f.initial(), b = f.initial();
  for (int n = 0; n < 30; ++n) a = advance(a, model, zero, 1e-4);
  for (int n = 0; n < 15; ++n) b = advance(b, model, zero, 1e-4);
  const std::string path = (root / "mid.nlchb").string();
  write_snapshot(b, SnapshotMeta{Mode::kNonlocal, 0.1, 0.5, 1e-4, ""}, path);
  b = read_snapshot(path).state;
  for (int n = 0; n < 15; ++n) b = advance(b, model, zero, 1e-4);
  out.details.push_back(fmt("in-memory 64^2 trajectory restarted at step 15: %s", a == b ? "identical" : "DIFFERENT"));
  identical = identical && a == b;
  fs::remove_all(root);
  out.pass = identical;
  out.summary = identical ? "checkpoint-restart reproduces the uninterrupted trajectory bit-exactly (3 restarts)"
                          : "restarted trajectory differs from the uninterrupted one";
  return out;
}

// --- 14 --------------------------------------------------------------------

Outcome validator() {
  const RunConfig c = parse_config("[grid]\nnx = 64\nny = 64\n");
  const Model model(c.grid(), c.material, c.potential, c.solver);
  const ValidationReport rep =
      validate_assumptions(model.kernel(), model.a(), c.potential, c.material, 3.0);
  const double half_l1 = 0.5 * kernel_l1_exact(model.kernel()->mollifier(), c.solver.epsilon);
  auto flagged = [&](const char* tag) {
    return std::any_of(rep.flags.begin(), rep.flags.end(),
                       [&](const std::string& s) { return s.find(tag) != std::string::npos; });
  };
  // Independent re-check of the reported constants on a finer sample of [-3, 3].
  std::size_t a4_bad = 0, a5_bad = 0;
  for (int k = 0; k <= 60000; ++k) {
    const double s = -3.0 + 6.0 * k / 60000.0;
    const PotentialValue v = potential_eval(c.potential, s);
    const double F = c.potential.eta_F * v.F, dF = c.potential.eta_F * v.dF;
    if (F < rep.c1 * s * s - rep.c2 - 1e-12) ++a4_bad;
    if (dF * dF > rep.c3 * std::abs(F) + rep.c4 + 1e-12 * (1.0 + dF * dF)) ++a5_bad;
  }
  const bool a4_holds = rep.c1 > rep.half_l1 && rep.a4_ok && a4_bad == 0;
  const bool a4_consistent = a4_holds || flagged("(A4)");
  const bool a5 = rep.p == 2.0 && rep.a5_ok && a5_bad == 0 && rep.s_min == -3.0 && rep.s_max == 3.0;
  Outcome out;
  out.pass = a4_consistent && a5;
  out.summary = fmt("(A4) c1 = %.6f vs |J|_1/2 = %.6f: %s; (A5) p = 2 on [-3,3] with c3 = %.4f, c4 = %.4f: %s",
                    rep.c1, rep.half_l1, a4_holds ? "satisfied" : (flagged("(A4)") ? "flagged" : "NOT FLAGGED"),
                    rep.c3, rep.c4, a5 ? "feasible" : "not confirmed");
  out.details.push_back(fmt("default config: 64^2, bump kernel eps %.2f gamma %.2f, F = (s^2-1)^2/4", c.solver.epsilon,
                            c.solver.gamma));
  out.details.push_back(fmt("reported |J|_1/2 %.8f, from radial quadrature %.8f", rep.half_l1, half_l1));
  out.details.push_back(fmt("c2 = %.6f; re-check on 60001 points: (A4) violations %zu, (A5) violations %zu", rep.c2,
                            a4_bad, a5_bad));
  out.details.push_back(fmt("validator flags: %zu%s", rep.flags.size(), rep.all_ok() ? " (all assumptions hold)" : ""));
  for (const auto& s : rep.flags) out.details.push_back("  " + s);
  return out;
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

const std::map<int, Criterion>& criteria() {
  static const std::map<int, Criterion> table{
      {1, {"convolution oracle", convolution_oracle}},
      {2, {"nonlocal energy identity", energy_identity}},
      {3, {"adjoint symmetry", adjoint_symmetry}},
      {4, {"renormalization constants", renormalization}},
      {5, {"mass conservation", mass_conservation}},
      {6, {"incompressibility", incompressibility}},
      {7, {"discrete energy law", energy_law}},
      {8, {"heat-balance invariant", heat_balance}},
      {9, {"time-stepping order", time_order}},
      {10, {"energy limit", gamma_limit}},
      {11, {"weak operator limit", weak_limit}},
      {12, {"solution convergence", solution_convergence}},
      {13, {"determinism", determinism}},
      {14, {"assumption validator", validator}},
  };
  return table;
}

bool run_one(int id, const Criterion& c) {
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o.pass = false;
    o.summary = std::string("exception: ") + e.what();
  }
  std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << fmt("%02d ", id) << c.name << ": " << o.summary << '\n';
  for (const auto& d : o.details) std::cout << "       " << d << '\n';
  std::cout.flush();
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks for the nonlocal Cahn-Hilliard-Boussinesq solver"};
  int which = 0;
  bool allow_fail = false;
  app.add_option("-c,--criterion", which, "criterion number; 0 runs all")->check(CLI::Range(0, 14));
  app.add_flag("--allow-fail", allow_fail, "exit 77 (skip) instead of 1 when the check fails");
  CLI11_PARSE(app, argc, argv);

  bool ok = true;
  for (const auto& [id, c] : criteria())
    if (which == 0 || which == id) ok = run_one(id, c) && ok;
  if (ok) return 0;
  return allow_fail ? 77 : 1;
}
