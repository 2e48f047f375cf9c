#include "nlchb/limits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "nlchb/energy.hpp"
#include "nlchb/spectral.hpp"

namespace nlchb {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs task(k) for k in [0, n) on up to `threads` workers.
template <class Task>
void parallel_for(std::size_t n, int threads, Task&& task) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) task(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < n; k = next++) {
          try {
            task(k);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void check_eps_list(const std::vector<double>& eps) {
  if (eps.empty()) throw Error("sweep: empty epsilon list");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) throw Error("sweep: epsilon must be positive");
    if (k > 0 && !(eps[k] < eps[k - 1])) throw Error("sweep: epsilon list must be strictly decreasing");
  }
}

double second_moment(const KernelGrid& k) {
  const Grid& g = k.grid();
  double s = 0.0;
  for (int n = -(g.ny() - 1); n < g.ny(); ++n)
    for (int m = -(g.nx() - 1); m < g.nx(); ++m) {
      const double x = m * g.dx();
      s += k.at(m, n) * x * x;
    }
  return s * g.cell_area();
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::string grid_text(const Grid& g) {
  std::ostringstream s;
  s << g.nx() << "x" << g.ny() << " on [0," << g.lx() << "]x[0," << g.ly() << "]";
  return s.str();
}

void kernel_metadata(SweepReport& r, const Grid& g, double gamma, MollifierShape shape) {
  r.add_metadata("grid", grid_text(g));
  r.add_metadata("gamma", fmt(gamma));
  r.add_metadata("mollifier", to_string(shape));
}

struct Built {
  std::optional<KernelGrid> kernel;
  std::optional<CoefficientA> a;
};

std::vector<Built> build_kernels(const Grid& g, const std::vector<double>& eps, double gamma, MollifierShape shape,
                                 int threads) {
  const Mollifier m = calibrate_mollifier(gamma, 2, shape);
  std::vector<Built> out(eps.size());
  parallel_for(eps.size(), threads, [&](std::size_t k) {
    out[k].kernel.emplace(g, m, eps[k]);
    out[k].a.emplace(compute_a(*out[k].kernel));
  });
  return out;
}

ScalarField apply_nonlocal(const KernelGrid& k, const CoefficientA& a, const ScalarField& f) {
  ScalarField out = f;
  for (std::size_t q = 0; q < out.size(); ++q) out[q] *= a.values()[q];
  out -= convolve(k, f);
  return out;
}

}  // namespace

SweepReport::SweepReport(std::string kind, std::vector<std::string> columns, std::vector<std::string> ratio_columns)
    : kind_(std::move(kind)), columns_(std::move(columns)), ratio_columns_(std::move(ratio_columns)) {
  for (const auto& c : ratio_columns_) index_of(c);
}

void SweepReport::add_row(double epsilon, std::vector<double> values, bool valid) {
  if (values.size() != columns_.size()) throw Error("sweep report: row has the wrong number of values");
  if (!eps_.empty() && !(epsilon < eps_.back())) throw Error("sweep report: epsilon must decrease strictly");
  eps_.push_back(epsilon);
  rows_.push_back(std::move(values));
  valid_.push_back(valid);
}

void SweepReport::add_metadata(std::string key, std::string value) {
  metadata_.emplace_back(std::move(key), std::move(value));
}

std::size_t SweepReport::index_of(const std::string& column) const {
  const auto it = std::find(columns_.begin(), columns_.end(), column);
  if (it == columns_.end()) throw Error("sweep report: unknown column '" + column + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

double SweepReport::value(std::size_t row, const std::string& column) const { return rows_.at(row)[index_of(column)]; }

std::vector<double> SweepReport::column(const std::string& name) const {
  const std::size_t c = index_of(name);
  std::vector<double> out;
  for (const auto& r : rows_) out.push_back(r[c]);
  return out;
}

std::vector<double> SweepReport::ratios(const std::string& name) const {
  const std::vector<double> v = column(name);
  std::vector<double> out(v.size(), kNaN);
  for (std::size_t k = 1; k < v.size(); ++k)
    if (valid_[k - 1] && valid_[k]) out[k] = v[k - 1] / v[k];
  return out;
}

bool SweepReport::strictly_decreasing(const std::string& name) const {
  const std::vector<double> v = column(name);
  std::optional<double> prev;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!valid_[k]) continue;
    if (!std::isfinite(v[k])) return false;
    if (prev && !(v[k] < *prev)) return false;
    prev = v[k];
  }
  return prev.has_value();
}

void SweepReport::write_csv(std::ostream& out) const {
  out << "# sweep: " << kind_ << "\n";
  for (const auto& [k, v] : metadata_) out << "# " << k << ": " << v << "\n";
  out << "epsilon,valid";
  for (const auto& c : columns_) out << "," << c;
  for (const auto& c : ratio_columns_) out << ",ratio_" << c;
  out << "\n";
  std::vector<std::vector<double>> ratios_by_col;
  for (const auto& c : ratio_columns_) ratios_by_col.push_back(ratios(c));
  out << std::setprecision(17);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    out << eps_[r] << "," << (valid_[r] ? 1 : 0);
    for (double v : rows_[r]) out << "," << v;
    for (const auto& rc : ratios_by_col) {
      out << ",";
      if (std::isfinite(rc[r])) out << rc[r];
    }
    out << "\n";
  }
}

void SweepReport::write_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write_csv(f);
  if (!f) throw Error("write failed for '" + path + "'");
}

SweepReport gamma_sweep(const ScalarField& phi, const std::vector<double>& eps_list, double gamma,
                        MollifierShape shape, int threads) {
  check_eps_list(eps_list);
  const Grid& g = phi.grid();
  const std::vector<Built> built = build_kernels(g, eps_list, gamma, shape, threads);
  SweepReport r("gamma",
                {"E_nl", "E_l", "abs_error", "rel_error", "grad_sq", "abs_error_grad_sq", "second_moment", "resolved"},
                {"abs_error", "abs_error_grad_sq"});
  kernel_metadata(r, g, gamma, shape);
  const double el = e_local(phi);
  r.add_metadata("E_l", fmt(el));
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    const KernelGrid& kern = *built[k].kernel;
    const double enl = e_nl(kern, *built[k].a, phi);
    const double err = std::abs(enl - el);
    r.add_row(eps_list[k], {enl, el, err, el != 0.0 ? err / el : 0.0, 2.0 * el, std::abs(enl - 2.0 * el),
                            second_moment(kern), kern.resolved() ? 1.0 : 0.0});
    for (const auto& w : kern.warnings()) r.add_metadata("warning", w);
  }
  return r;
}

SweepReport weak_operator_check(const ScalarField& phi1, const ScalarField& phi2, const std::vector<double>& eps_list,
                                double gamma, MollifierShape shape, int threads) {
  check_eps_list(eps_list);
  require_same_grid(phi1.grid(), phi2.grid(), "weak_operator_check");
  const Grid& g = phi1.grid();
  const std::vector<Built> built = build_kernels(g, eps_list, gamma, shape, threads);
  SweepReport r("weak_operator", {"form", "form_transposed", "target", "abs_error", "symmetry_defect", "second_moment",
                                  "resolved"},
                {"abs_error"});
  kernel_metadata(r, g, gamma, shape);
  const double target = inner(face_gradient(phi1), face_gradient(phi2));
  r.add_metadata("target", fmt(target));
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    const KernelGrid& kern = *built[k].kernel;
    const double f12 = inner(apply_nonlocal(kern, *built[k].a, phi1), phi2);
    const double f21 = inner(apply_nonlocal(kern, *built[k].a, phi2), phi1);
    r.add_row(eps_list[k], {f12, f21, target, std::abs(f12 - target), std::abs(f12 - f21), second_moment(kern),
                            kern.resolved() ? 1.0 : 0.0});
  }
  return r;
}

SimState spinodal_state(const Grid& grid, double amplitude, double mean) {
  SimState s(grid);
  const double lx = grid.lx(), ly = grid.ly();
  s.phi = ScalarField::from_function(grid, [&](double x, double y) {
    return amplitude * std::cos(2.0 * std::numbers::pi * x / lx) * std::cos(std::numbers::pi * y / ly) + mean;
  });
  return s;
}

namespace {

struct Trace {
  bool ok = true;
  std::string failure;
  std::vector<SimState> samples;
  double energy = kNaN;
  double natural_energy = kNaN;
  double mass_drift = 0.0;
};

Trace run_trace(const SolutionSweepConfig& cfg, Mode mode, double eps, const std::vector<long>& sample_steps,
                long steps, double dt) {
  SolverConfig sc = cfg.solver;
  sc.mode = mode;
  if (mode == Mode::kNonlocal) sc.epsilon = eps;
  const Model model(cfg.grid, cfg.material, cfg.potential, sc);
  Trace tr;
  SimState s = cfg.initial;
  const double m0 = mean(s.phi);
  std::size_t next = 0;
  try {
    for (long n = 0; n <= steps; ++n) {
      if (next < sample_steps.size() && sample_steps[next] == n) {
        tr.samples.push_back(s);
        tr.mass_drift = std::max(tr.mass_drift, std::abs(mean(s.phi) - m0));
        ++next;
      }
      if (n < steps) s = advance(s, model, cfg.forcing, dt);
    }
  } catch (const BlowUp& e) {
    tr.ok = false;
    tr.failure = e.what();
    return tr;
  }
  const EnergyParts e = energy_parts(s, model.energy_model());
  tr.energy = e.total;
  tr.natural_energy = (e.interface + e.F_integral) / cfg.material.l_c + e.kinetic + e.thermal;
  return tr;
}

double dist2(const SimState& a, const SimState& b, int which) {
  if (which == 0) {
    const ScalarField d = a.phi - b.phi;
    return inner(d, d);
  }
  if (which == 1) {
    const ScalarField d = a.theta - b.theta;
    return inner(d, d);
  }
  MacVelocity d = a.u;
  d.axpy(-1.0, b.u);
  return inner(d, d);
}

}  // namespace

SweepReport solution_sweep(const SolutionSweepConfig& cfg, const std::vector<double>& eps_list) {
  check_eps_list(eps_list);
  require_same_grid(cfg.grid, cfg.initial.grid(), "solution_sweep");
  cfg.solver.validate();
  if (cfg.samples < 1) throw Error("solution_sweep: samples must be >= 1");
  const double T = cfg.solver.t_end;
  const long steps = std::max(1L, std::lround(T / cfg.solver.dt));
  const double dt = T > 0.0 ? T / static_cast<double>(steps) : cfg.solver.dt;
  std::vector<long> sample_steps;
  for (int k = 0; k <= cfg.samples; ++k) {
    const long s = std::lround(static_cast<double>(k) * steps / cfg.samples);
    if (sample_steps.empty() || s > sample_steps.back()) sample_steps.push_back(s);
  }

  // slot 0: local reference, slot k+1: eps_list[k]
  std::vector<Trace> traces(eps_list.size() + 1);
  parallel_for(traces.size(), cfg.threads, [&](std::size_t k) {
    traces[k] = k == 0 ? run_trace(cfg, Mode::kLocal, 0.0, sample_steps, steps, dt)
                       : run_trace(cfg, Mode::kNonlocal, eps_list[k - 1], sample_steps, steps, dt);
  });
  const Trace& ref = traces[0];
  if (!ref.ok) throw Error("solution_sweep: local reference run failed: " + ref.failure);

  SweepReport r("solution",
                {"phi_end", "theta_end", "u_end", "phi_L2I", "theta_L2I", "u_L2I", "energy", "energy_gap",
                 "natural_energy_gap", "mass_drift"},
                {"phi_L2I", "theta_L2I", "u_L2I", "energy_gap", "natural_energy_gap"});
  r.add_metadata("grid", grid_text(cfg.grid));
  r.add_metadata("gamma", fmt(cfg.solver.gamma));
  r.add_metadata("mollifier", to_string(cfg.solver.shape));
  r.add_metadata("dt", fmt(dt));
  r.add_metadata("t_end", fmt(T));
  r.add_metadata("steps", std::to_string(steps));
  r.add_metadata("samples", std::to_string(sample_steps.size()));
  r.add_metadata("eta_F", fmt(cfg.potential.eta_F));
  r.add_metadata("reference_energy", fmt(ref.energy));
  r.add_metadata("reference_natural_energy", fmt(ref.natural_energy));
  r.add_metadata("reference_mass_drift", fmt(ref.mass_drift));

  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    const Trace& tr = traces[k + 1];
    if (!tr.ok) {
      r.add_row(eps_list[k], std::vector<double>(r.columns().size(), kNaN), false);
      r.add_metadata("failure eps=" + fmt(eps_list[k]), tr.failure);
      continue;
    }
    std::vector<double> vals;
    for (int which = 0; which < 3; ++which) vals.push_back(std::sqrt(dist2(tr.samples.back(), ref.samples.back(), which)));
    for (int which = 0; which < 3; ++which) {
      double acc = 0.0;
      for (std::size_t j = 1; j < sample_steps.size(); ++j) {
        const double h = (sample_steps[j] - sample_steps[j - 1]) * dt;
        acc += 0.5 * h * (dist2(tr.samples[j - 1], ref.samples[j - 1], which) + dist2(tr.samples[j], ref.samples[j], which));
      }
      vals.push_back(std::sqrt(acc));
    }
    vals.push_back(tr.energy);
    vals.push_back(std::abs(tr.energy - ref.energy));
    vals.push_back(std::abs(tr.energy - ref.natural_energy));
    vals.push_back(tr.mass_drift);
    r.add_row(eps_list[k], std::move(vals));
  }
  return r;
}

}  // namespace nlchb
