#include "nlchb/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <json.hpp>
#include <numbers>
#include <random>

#include "nlchb/io.hpp"
#include "nlchb/limits.hpp"
#include "nlchb/solver.hpp"

namespace fs = std::filesystem;

namespace nlchb {

namespace {

fs::path output_dir(const RunConfig& c, const CommandEnv& env) {
  fs::path p = env.output_dir.empty() ? fs::path(c.output.directory) : fs::path(env.output_dir);
  fs::create_directories(p);
  return p;
}

std::string numbered(const char* stem, std::int64_t step, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%08lld.%s", stem, static_cast<long long>(step), ext);
  return buf;
}

SolverConfig solver_for(const RunConfig& c, double dt) {
  SolverConfig s = c.solver;
  s.dt = dt;
  return s;
}

// auto: the suggestion rounded down so that an integer number of steps lands on t_end
double resolve_dt(const RunConfig& c, const SimState& s, const Model& model) {
  if (!c.dt_auto) return c.solver.dt;
  const double dt = suggest_dt(s, model);
  if (!(c.solver.t_end > 0.0)) return dt;
  return c.solver.t_end / std::ceil(c.solver.t_end / dt);
}

void write_outputs(const RunConfig& c, const SimState& s, const SnapshotMeta& meta, const fs::path& out) {
  if (c.output.ppm) {
    write_ppm(s.phi, 1.0, (out / numbered("phi", s.step, "ppm")).string());
    write_ppm(s.theta, std::max(max_abs(s.theta), 1e-300), (out / numbered("theta", s.step, "ppm")).string());
  }
  if (c.output.snapshot) write_snapshot(s, meta, (out / numbered("snap", s.step, "nlchb")).string());
}

int run_loop(const RunConfig& c, SimState s, double dt, const fs::path& out, std::ostream& log) {
  const Model model(c.grid(), c.material, c.potential, solver_for(c, dt));
  const Forcing forcing = make_forcing(c);
  const EnergyModel em = model.energy_model();
  const std::int64_t total = c.solver.t_end > 0.0 ? std::max<std::int64_t>(1, std::llround(c.solver.t_end / dt)) : 0;
  const SnapshotMeta meta{c.solver.mode, c.solver.mode == Mode::kNonlocal ? c.solver.epsilon : 0.0,
                          c.solver.mode == Mode::kNonlocal ? c.solver.gamma : 0.0, dt, to_text(c)};

  std::optional<CsvLedgerWriter> csv;
  if (c.output.csv) csv.emplace((out / "ledger.csv").string());
  EnergyLedger ledger;
  auto record = [&](const SimState& st, double residual) {
    const LedgerRow row = make_ledger_row(st, st.mu, forcing, em, residual, dt);
    ledger.append(row);
    if (csv) csv->write(row);
  };

  log << "dt = " << format_double(dt) << ", steps " << s.step << " -> " << total << "\n";
  if (s.step == 0) {
    record(s, 0.0);
    write_outputs(c, s, meta, out);
  }
  double acc = 0.0;
  try {
    while (s.step < total) {
      double r = 0.0;
      s = advance(s, model, forcing, dt, &r);
      acc += r;
      if (s.step % c.solver.cadence == 0 || s.step == total) {
        record(s, acc);
        acc = 0.0;
        write_outputs(c, s, meta, out);
        log << "step " << s.step << "  t = " << format_double(s.t) << "  E = " << format_double(ledger.rows().back().E_total)
            << "\n";
      }
    }
  } catch (const BlowUp& e) {
    write_snapshot(e.last_good(), meta, (out / "blowup.nlchb").string());
    std::ofstream diag(out / "blowup.txt");
    diag << e.what() << "\nlast finite state: step " << e.last_good().step << ", t = " << format_double(e.last_good().t)
         << "\ndt = " << format_double(dt) << ", suggested dt at that state = "
         << format_double(suggest_dt(e.last_good(), model)) << "\n";
    log << "blow-up: " << e.what() << " (state saved to " << (out / "blowup.nlchb").string() << ")\n";
    return kExitBlowUp;
  } catch (const Error& e) {
    write_snapshot(s, meta, (out / "failure.nlchb").string());
    std::ofstream(out / "failure.txt") << e.what() << "\n";
    log << "run stopped: " << e.what() << "\n";
    return kExitInvariant;
  }
  write_snapshot(s, meta, (out / "checkpoint.nlchb").string());
  log << "finished at t = " << format_double(s.t) << "\n";
  return kExitOk;
}

nlohmann::json report_to_json(const ValidationReport& r) {
  nlohmann::json j;
  j["A1"] = {{"ok", r.a1_ok},
             {"a_min", r.a_min},
             {"a_max", r.a_max},
             {"kernel_l1", r.kernel_l1},
             {"kernel_grad_l1", r.kernel_grad_l1},
             {"symmetric", r.kernel_symmetric},
             {"nonnegative", r.kernel_nonnegative}};
  j["A2"] = {{"ok", r.a2_ok}, {"nu_sample_min", r.nu_sample_min}, {"nu_sample_max", r.nu_sample_max}};
  j["A3"] = {{"ok", r.a3_ok}, {"min_ddF", r.min_ddF}, {"c0", r.c0}};
  j["A4"] = {{"ok", r.a4_ok}, {"c1", r.c1}, {"c2", r.c2}, {"half_l1", r.half_l1}, {"violations", r.a4_violations}};
  j["A5"] = {{"ok", r.a5_ok}, {"p", r.p}, {"c3", r.c3}, {"c4", r.c4}, {"violations", r.a5_violations},
             {"holds_globally", r.a5_global}};
  j["A6"] = {{"ok", r.a6_ok}};
  j["s_range"] = {r.s_min, r.s_max};
  j["flags"] = r.flags;
  j["all_ok"] = r.all_ok();
  return j;
}

ValidationReport validate_model(const Model& m) {
  return validate_assumptions(m.kernel(), m.a(), m.potential(), m.material(), 3.0);
}

void print_sweep(const SweepReport& r, const std::vector<std::string>& cols, std::ostream& log) {
  log << std::setw(10) << "epsilon";
  for (const auto& c : cols) log << std::setw(16) << c;
  log << "\n";
  for (std::size_t k = 0; k < r.size(); ++k) {
    log << std::setw(10) << r.epsilon(k);
    for (const auto& c : cols) log << std::setw(16) << std::setprecision(8) << r.value(k, c);
    log << (r.valid(k) ? "" : "   (invalid)") << "\n";
  }
}

}  // namespace

CommandEnv env_from_environment() {
  CommandEnv env;
  if (const char* d = std::getenv("NLCHB_OUTPUT_DIR"); d && *d) env.output_dir = d;
  if (const char* t = std::getenv("NLCHB_THREADS"); t && *t) {
    char* end = nullptr;
    const long n = std::strtol(t, &end, 10);
    if (*end != '\0' || n < 1) throw Error(std::string("NLCHB_THREADS must be a positive integer, got '") + t + "'");
    env.threads = static_cast<int>(n);
  }
  return env;
}

std::string report_json(const ValidationReport& report) { return report_to_json(report).dump(2); }

int cmd_run(const RunConfig& c, const CommandEnv& env) {
  std::ostream& log = *env.log;
  const fs::path out = output_dir(c, env);
  for (const auto& w : c.warnings) log << "warning: " << w << "\n";
  const SimState s = initial_state(c);
  // dt may depend on the model only through a and S, which do not depend on dt
  const Model probe(c.grid(), c.material, c.potential, c.solver);
  const double dt = resolve_dt(c, s, probe);
  const ValidationReport report = validate_model(probe);
  std::ofstream(out / "validation.json") << report_json(report) << "\n";
  for (const auto& f : report.flags) log << "assumption flag: " << f << "\n";
  std::ofstream(out / "config.txt") << to_text(c);
  return run_loop(c, s, dt, out, log);
}

int cmd_resume(const std::string& checkpoint, const CommandEnv& env) {
  Snapshot snap = read_snapshot(checkpoint);
  if (snap.meta.config.empty()) throw Error("resume: '" + checkpoint + "' carries no configuration");
  const RunConfig c = parse_config(snap.meta.config);
  if (snap.state.grid() != c.grid()) throw Error("resume: snapshot grid does not match its configuration");
  if (snap.meta.mode != c.solver.mode) throw Error("resume: snapshot mode does not match its configuration");
  const fs::path out = output_dir(c, env);
  *env.log << "resuming from step " << snap.state.step << " (t = " << format_double(snap.state.t) << ")\n";
  return run_loop(c, std::move(snap.state), snap.meta.dt, out, *env.log);
}

int cmd_sweep_eps(const RunConfig& c, const std::vector<double>& eps_list, const CommandEnv& env) {
  const fs::path out = output_dir(c, env);
  SolutionSweepConfig sc(c.grid());
  sc.material = c.material;
  sc.potential = c.potential;
  sc.solver = c.solver;
  sc.initial = initial_state(c);
  sc.forcing = make_forcing(c);
  sc.threads = env.threads;
  if (c.dt_auto) {
    // one step size for every run: the smallest suggestion among them
    SolverConfig local = c.solver;
    local.mode = Mode::kLocal;
    double dt = suggest_dt(sc.initial, Model(c.grid(), c.material, c.potential, local));
    for (double e : eps_list) {
      SolverConfig nl = c.solver;
      nl.mode = Mode::kNonlocal;
      nl.epsilon = e;
      dt = std::min(dt, suggest_dt(sc.initial, Model(c.grid(), c.material, c.potential, nl)));
    }
    sc.solver.dt = dt;
  }
  const SweepReport r = solution_sweep(sc, eps_list);
  r.write_csv((out / "sweep_eps.csv").string());
  print_sweep(r, {"phi_L2I", "theta_L2I", "u_L2I", "energy_gap", "natural_energy_gap"}, *env.log);
  for (const char* col : {"phi_L2I", "theta_L2I", "u_L2I"})
    *env.log << col << (r.strictly_decreasing(col) ? " decreases" : " does NOT decrease") << " as epsilon decreases\n";
  for (std::size_t k = 0; k < r.size(); ++k)
    if (!r.valid(k)) return kExitFailed;
  return kExitOk;
}

int cmd_gamma_sweep(const RunConfig& c, const std::vector<double>& eps_list, const CommandEnv& env,
                    const std::vector<int>& grids) {
  const fs::path out = output_dir(c, env);
  std::vector<int> sizes = grids;
  if (sizes.empty()) sizes.push_back(0);
  for (int n : sizes) {
    RunConfig cc = c;
    if (n > 0) cc.nx = cc.ny = n;
    const ScalarField phi = initial_state(cc).phi;
    const SweepReport g = gamma_sweep(phi, eps_list, c.solver.gamma, c.solver.shape, env.threads);
    const SweepReport w = weak_operator_check(phi, phi, eps_list, c.solver.gamma, c.solver.shape, env.threads);
    const std::string suffix = n > 0 ? "_n" + std::to_string(n) : "";
    g.write_csv((out / ("gamma_sweep" + suffix + ".csv")).string());
    w.write_csv((out / ("weak_operator" + suffix + ".csv")).string());
    *env.log << "grid " << cc.nx << "x" << cc.ny << "\n";
    print_sweep(g, {"E_nl", "E_l", "abs_error", "abs_error_grad_sq", "second_moment"}, *env.log);
    print_sweep(w, {"form", "target", "abs_error", "symmetry_defect"}, *env.log);
  }
  return kExitOk;
}

int cmd_oracle(const RunConfig& c, const CommandEnv& env, const OracleHooks& hooks) {
  const Grid g = c.grid();
  if (g.size() > 32 * 32) throw Error("oracle: grid must have at most 32x32 cells");
  std::ostream& log = *env.log;
  bool all = true;
  auto row = [&](const std::string& name, double value, double tol) {
    const bool ok = std::isfinite(value) && value <= tol;
    all = all && ok;
    log << std::left << std::setw(34) << name << std::right << std::setw(14) << std::setprecision(4) << value
        << std::setw(12) << tol << "  " << (ok ? "PASS" : "FAIL") << "\n";
  };
  log << std::left << std::setw(34) << "oracle" << std::right << std::setw(14) << "deviation" << std::setw(12)
      << "tolerance" << "  result\n";

  const double c2 = compute_cd(2), c3 = compute_cd(3);
  log << "C_2 = " << std::setprecision(17) << c2 << "  (pi = " << std::numbers::pi << ")\n";
  log << "C_3 = " << c3 << "  (4 pi/3 = " << 4.0 * std::numbers::pi / 3.0 << ")\n";
  row("C_2 vs pi", std::abs(c2 - std::numbers::pi), 1e-8);
  row("C_3 vs 4pi/3", std::abs(c3 - 4.0 * std::numbers::pi / 3.0), 1e-6);
  const Mollifier m = calibrate_mollifier(c.solver.gamma, 2, c.solver.shape);
  row("mollifier calibration residual", std::abs(renormalization_integral(m) - 2.0 / c2), 1e-8);

  KernelGrid kernel(g, m, c.solver.epsilon);
  if (hooks.corrupt_kernel_symmetry) {
    std::vector<double> lat = kernel.lattice();
    const int cx = g.nx() - 1, cy = g.ny() - 1, lnx = kernel.lattice_nx();
    lat[static_cast<std::size_t>(cy) * lnx + cx + 1] *= 1.5;
    kernel = KernelGrid::from_lattice(g, std::move(lat), c.solver.epsilon, c.solver.gamma);
  }
  double asym = 0.0, jmax = 0.0;
  for (int n = -(g.ny() - 1); n < g.ny(); ++n)
    for (int k = -(g.nx() - 1); k < g.nx(); ++k) {
      const double v = kernel.at(k, n);
      jmax = std::max(jmax, std::abs(v));
      asym = std::max({asym, std::abs(v - kernel.at(-k, -n)), std::abs(v - kernel.at(-k, n))});
    }
  row("kernel symmetry J(x) = J(-x)", asym / jmax, 1e-14);

  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField p1(g), p2(g);
  for (double& v : p1.values()) v = dist(rng);
  for (double& v : p2.values()) v = dist(rng);
  const ScalarField fast = convolve(kernel, p1), direct = convolve_direct(kernel, p1);
  double diff = 0.0;
  for (std::size_t k = 0; k < fast.size(); ++k) diff = std::max(diff, std::abs(fast[k] - direct[k]));
  row("FFT vs direct convolution", diff / max_abs(direct), 1e-12);
  const double s12 = inner(p1, convolve(kernel, p2)), s21 = inner(p2, convolve(kernel, p1));
  row("adjoint symmetry", std::abs(s12 - s21) / std::abs(s12), 1e-12);
  const CoefficientA a = compute_a(kernel);
  const ScalarField ones = convolve_direct(kernel, ScalarField(g, 1.0));
  double da = 0.0;
  for (std::size_t k = 0; k < ones.size(); ++k) da = std::max(da, std::abs(a.values()[k] - ones[k]));
  row("a(x) vs direct sum", da / a.max(), 1e-12);
  const double enl = e_nl(kernel, a, p1), enl_direct = e_nl_direct(kernel, p1);
  row("E_nl vs direct double sum", std::abs(enl - enl_direct) / enl_direct, 1e-10);

  double dF = 0.0, ddF = 0.0;
  const double h = 1e-5;
  for (int k = 0; k <= 600; ++k) {
    const double s = -3.0 + 0.01 * k;
    const PotentialValue v = potential_eval(c.potential, s);
    const PotentialValue vp = potential_eval(c.potential, s + h), vm = potential_eval(c.potential, s - h);
    dF = std::max(dF, std::abs(v.dF - (vp.F - vm.F) / (2 * h)) / (1.0 + std::abs(v.dF)));
    ddF = std::max(ddF, std::abs(v.ddF - (vp.dF - vm.dF) / (2 * h)) / (1.0 + std::abs(v.ddF)));
  }
  row("F' vs finite difference", dF, 1e-6);
  row("F'' vs finite difference", ddF, 1e-6);
  log << (all ? "all oracles passed" : "ORACLE FAILURE") << "\n";
  return all ? kExitOk : kExitFailed;
}

int cmd_validate(const RunConfig& c, const CommandEnv& env) {
  for (const auto& w : c.warnings) *env.log << "warning: " << w << "\n";
  const Model model(c.grid(), c.material, c.potential, c.solver);
  const ValidationReport r = validate_model(model);
  *env.log << report_json(r) << "\n";
  return r.all_ok() ? kExitOk : kExitFailed;
}

}  // namespace nlchb
