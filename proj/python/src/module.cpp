// Python bindings. Cell fields cross the boundary as float64 arrays of shape
// (ny, nx); MAC velocities as u (ny, nx+1) and v (ny+1, nx).

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "nlchb/commands.hpp"
#include "nlchb/config.hpp"
#include "nlchb/energy.hpp"
#include "nlchb/io.hpp"
#include "nlchb/kernel.hpp"
#include "nlchb/limits.hpp"
#include "nlchb/solver.hpp"

namespace py = pybind11;
using namespace nlchb;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(std::span<const double> values, int rows, int cols) {
  Array out({rows, cols});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

Array to_array(const ScalarField& f) { return to_array(f.values(), f.grid().ny(), f.grid().nx()); }

void copy_into(std::span<double> dst, const Array& src, int rows, int cols, const char* what) {
  if (src.ndim() != 2 || src.shape(0) != rows || src.shape(1) != cols)
    throw Error(std::string(what) + ": expected an array of shape (" + std::to_string(rows) + ", " +
                std::to_string(cols) + ")");
  std::copy(src.data(), src.data() + src.size(), dst.begin());
}

ScalarField to_field(const Grid& g, const Array& a) {
  ScalarField f(g);
  copy_into(f.values(), a, g.ny(), g.nx(), "field");
  return f;
}

py::dict report_dict(const SweepReport& r) {
  py::dict d;
  d["kind"] = r.kind();
  std::vector<double> eps;
  std::vector<bool> valid;
  for (std::size_t k = 0; k < r.size(); ++k) {
    eps.push_back(r.epsilon(k));
    valid.push_back(r.valid(k));
  }
  d["epsilon"] = eps;
  d["valid"] = valid;
  for (const auto& c : r.columns()) d[py::str(c)] = r.column(c);
  py::dict meta;
  for (const auto& [k, v] : r.metadata()) meta[py::str(k)] = v;
  d["metadata"] = meta;
  return d;
}

py::dict ledger_dict(const LedgerRow& row) {
  py::dict d;
  const auto values = ledger_values(row);
  for (std::size_t k = 0; k < values.size(); ++k) d[py::str(ledger_columns()[k])] = values[k];
  return d;
}

/// A configured run held in memory.
class Simulation {
public:
  explicit Simulation(const std::string& config_text)
      : config_(parse_config(config_text)),
        model_(std::make_unique<Model>(config_.grid(), config_.material, config_.potential, config_.solver)),
        state_(initial_state(config_)),
        forcing_(make_forcing(config_)) {
    dt_ = config_.solver.dt;
    if (config_.dt_auto) {
      dt_ = suggest_dt(state_, *model_);
      if (config_.solver.t_end > 0.0) dt_ = config_.solver.t_end / std::ceil(config_.solver.t_end / dt_);
    }
  }

  /// Advances n steps; returns the summed energy-budget residual.
  double step(int n) {
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      double r = 0.0;
      state_ = advance(state_, *model_, forcing_, dt_, &r);
      total += r;
    }
    return total;
  }

  double energy() const { return total_energy(state_, model_->energy_model()); }
  py::dict ledger_row() const {
    return ledger_dict(make_ledger_row(state_, state_.mu, forcing_, model_->energy_model(), 0.0, dt_));
  }
  double suggested_dt() const { return suggest_dt(state_, *model_); }

  void save(const std::string& path) const {
    write_snapshot(state_, SnapshotMeta{config_.solver.mode, config_.solver.epsilon, config_.solver.gamma, dt_,
                                        to_text(config_)},
                   path);
  }
  void load(const std::string& path) {
    Snapshot s = read_snapshot(path);
    if (s.state.grid() != config_.grid()) throw Error("snapshot grid does not match the simulation");
    state_ = std::move(s.state);
  }

  Array phi() const { return to_array(state_.phi); }
  Array theta() const { return to_array(state_.theta); }
  Array mu() const { return to_array(state_.mu); }
  Array u() const { return to_array(state_.u.u_values(), state_.grid().ny(), state_.grid().nx() + 1); }
  Array v() const { return to_array(state_.u.v_values(), state_.grid().ny() + 1, state_.grid().nx()); }
  void set_phi(const Array& a) { state_.phi = to_field(state_.grid(), a); }
  void set_theta(const Array& a) { state_.theta = to_field(state_.grid(), a); }
  void set_velocity(const Array& u, const Array& v) {
    const Grid& g = state_.grid();
    MacVelocity w(g);
    copy_into(w.u_values(), u, g.ny(), g.nx() + 1, "u");
    copy_into(w.v_values(), v, g.ny() + 1, g.nx(), "v");
    w.apply_no_penetration();
    state_.u = std::move(w);
  }
  Array divergence_u() const { return to_array(divergence(state_.u)); }

  double t() const { return state_.t; }
  std::int64_t steps() const { return state_.step; }
  double dt() const { return dt_; }
  void set_dt(double dt) {
    if (!(dt > 0.0)) throw Error("dt must be positive");
    dt_ = dt;
  }
  std::string config() const { return to_text(config_); }

private:
  RunConfig config_;
  std::unique_ptr<Model> model_;
  SimState state_;
  Forcing forcing_;
  double dt_ = 0.0;
};

struct Kernel {
  KernelGrid grid;
  CoefficientA a;
};

Kernel make_kernel(int nx, int ny, double lx, double ly, double epsilon, double gamma, const std::string& shape) {
  KernelGrid k(Grid::make(nx, ny, lx, ly), calibrate_mollifier(gamma, 2, parse_mollifier_shape(shape)), epsilon);
  CoefficientA a = compute_a(k);
  return Kernel{std::move(k), std::move(a)};
}

int run_command(const std::string& config_text, const std::string& output_dir, int threads) {
  std::ostringstream log;
  return cmd_run(parse_config(config_text), CommandEnv{output_dir, threads, &log});
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Nonlocal Cahn-Hilliard-Boussinesq solver core";

  // later registrations are tried first
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("compute_cd", &compute_cd, py::arg("d"), "Integral of |sigma . e1|^2 over the unit sphere in R^d.");
  m.def(
      "calibration_constant",
      [](double gamma, int d, const std::string& shape) {
        return calibrate_mollifier(gamma, d, parse_mollifier_shape(shape)).c_eta;
      },
      py::arg("gamma"), py::arg("d") = 2, py::arg("shape") = "bump");
  m.def(
      "calibration_residual",
      [](double gamma, int d, const std::string& shape) {
        const Mollifier mo = calibrate_mollifier(gamma, d, parse_mollifier_shape(shape));
        const double target = 2.0 / compute_cd(d);
        return std::abs(renormalization_integral(mo) - target) / target;
      },
      py::arg("gamma"), py::arg("d") = 2, py::arg("shape") = "bump");

  py::class_<Kernel>(m, "Kernel", "Sampled J_eps on a grid together with a(x).")
      .def(py::init(&make_kernel), py::arg("nx"), py::arg("ny"), py::arg("lx") = 1.0, py::arg("ly") = 1.0,
           py::arg("epsilon") = 0.1, py::arg("gamma") = 0.5, py::arg("shape") = "bump")
      .def_property_readonly("epsilon", [](const Kernel& k) { return k.grid.epsilon(); })
      .def_property_readonly("resolved", [](const Kernel& k) { return k.grid.resolved(); })
      .def_property_readonly("l1", [](const Kernel& k) { return kernel_norms(k.grid).l1; })
      .def_property_readonly("a", [](const Kernel& k) { return to_array(k.a.values()); })
      .def("convolve", [](const Kernel& k, const Array& phi) { return to_array(convolve(k.grid, to_field(k.grid.grid(), phi))); })
      .def("convolve_direct",
           [](const Kernel& k, const Array& phi) { return to_array(convolve_direct(k.grid, to_field(k.grid.grid(), phi))); })
      .def("energy", [](const Kernel& k, const Array& phi) { return e_nl(k.grid, k.a, to_field(k.grid.grid(), phi)); },
           "(a phi, phi) - (phi, J*phi)")
      .def("energy_direct",
           [](const Kernel& k, const Array& phi) { return e_nl_direct(k.grid, to_field(k.grid.grid(), phi)); });

  m.def(
      "local_energy",
      [](const Array& phi, double lx, double ly) {
        const Grid g = Grid::make(static_cast<int>(phi.shape(1)), static_cast<int>(phi.shape(0)), lx, ly);
        return e_local(to_field(g, phi));
      },
      py::arg("phi"), py::arg("lx") = 1.0, py::arg("ly") = 1.0, "1/2 |grad phi|^2 with the compact face gradient.");

  m.def(
      "gamma_sweep",
      [](const Array& phi, const std::vector<double>& eps, double gamma, double lx, double ly, const std::string& shape,
         int threads) {
        const Grid g = Grid::make(static_cast<int>(phi.shape(1)), static_cast<int>(phi.shape(0)), lx, ly);
        return report_dict(gamma_sweep(to_field(g, phi), eps, gamma, parse_mollifier_shape(shape), threads));
      },
      py::arg("phi"), py::arg("eps"), py::arg("gamma") = 0.5, py::arg("lx") = 1.0, py::arg("ly") = 1.0,
      py::arg("shape") = "bump", py::arg("threads") = 1);

  m.def(
      "validate",
      [](const std::string& text) {
        const RunConfig c = parse_config(text);
        const Model model(c.grid(), c.material, c.potential, c.solver);
        return report_json(validate_assumptions(model.kernel(), model.a(), c.potential, c.material));
      },
      py::arg("config"), "Assumption report as JSON text.");
  m.def("normalize_config", [](const std::string& text) { return to_text(parse_config(text)); }, py::arg("config"),
        "Canonical text form of a configuration.");
  m.def("config_warnings", [](const std::string& text) { return parse_config(text).warnings; }, py::arg("config"));
  m.def("run", &run_command, py::arg("config"), py::arg("output_dir"), py::arg("threads") = 1,
        "Runs a configuration to t_end writing the usual outputs; returns the exit code.");
  m.def(
      "resume",
      [](const std::string& checkpoint, const std::string& output_dir) {
        std::ostringstream log;
        return cmd_resume(checkpoint, CommandEnv{output_dir, 1, &log});
      },
      py::arg("checkpoint"), py::arg("output_dir"));

  py::class_<Simulation>(m, "Simulation", "A configured run held in memory.")
      .def(py::init<const std::string&>(), py::arg("config"))
      .def("step", &Simulation::step, py::arg("n") = 1, "Advance n steps; returns the summed energy residual.")
      .def("energy", &Simulation::energy)
      .def("ledger_row", &Simulation::ledger_row)
      .def("suggested_dt", &Simulation::suggested_dt)
      .def("save", &Simulation::save, py::arg("path"))
      .def("load", &Simulation::load, py::arg("path"))
      .def("divergence", &Simulation::divergence_u)
      .def("set_velocity", &Simulation::set_velocity, py::arg("u"), py::arg("v"))
      .def_property("phi", &Simulation::phi, &Simulation::set_phi)
      .def_property("theta", &Simulation::theta, &Simulation::set_theta)
      .def_property_readonly("mu", &Simulation::mu)
      .def_property_readonly("u", &Simulation::u)
      .def_property_readonly("v", &Simulation::v)
      .def_property_readonly("t", &Simulation::t)
      .def_property_readonly("steps", &Simulation::steps)
      .def_property("dt", &Simulation::dt, &Simulation::set_dt)
      .def_property_readonly("config", &Simulation::config);
}
