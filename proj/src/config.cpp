#include "nlchb/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "nlchb/io.hpp"
#include "nlchb/mac.hpp"
#include "nlchb/spectral.hpp"

namespace nlchb {

namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) throw Error("expected a number, got '" + s + "'");
  return v;
}

long long to_integer(const std::string& s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) throw Error("expected an integer, got '" + s + "'");
  return v;
}

int to_int(const std::string& s) {
  const long long v = to_integer(s);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) throw Error("integer out of range");
  return static_cast<int>(v);
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw Error("expected true/false, got '" + s + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& key_table() {
  static const std::map<std::string, std::map<std::string, Setter>> table{
      {"",
       {{"seed", [](RunConfig& c, const std::string& v) {
           const long long s = to_integer(v);
           if (s < 0) throw Error("seed must be nonnegative");
           c.seed = static_cast<std::uint64_t>(s);
         }}}},
      {"grid",
       {{"nx", [](RunConfig& c, const std::string& v) { c.nx = to_int(v); }},
        {"ny", [](RunConfig& c, const std::string& v) { c.ny = to_int(v); }},
        {"lx", [](RunConfig& c, const std::string& v) { c.lx = to_double(v); }},
        {"ly", [](RunConfig& c, const std::string& v) { c.ly = to_double(v); }}}},
      {"physics",
       {{"K", [](RunConfig& c, const std::string& v) { c.material.K_cap = to_double(v); }},
        {"l_c", [](RunConfig& c, const std::string& v) { c.material.l_c = to_double(v); }},
        {"l_h", [](RunConfig& c, const std::string& v) { c.material.l_h = to_double(v); }},
        {"kappa", [](RunConfig& c, const std::string& v) { c.material.kappa = to_double(v); }},
        {"nu_min", [](RunConfig& c, const std::string& v) { c.material.nu_min = to_double(v); }},
        {"nu_max", [](RunConfig& c, const std::string& v) { c.material.nu_max = to_double(v); }},
        {"alpha0", [](RunConfig& c, const std::string& v) { c.material.alpha0 = to_double(v); }},
        {"alpha1", [](RunConfig& c, const std::string& v) { c.material.alpha1 = to_double(v); }},
        {"alpha2", [](RunConfig& c, const std::string& v) { c.material.alpha2 = to_double(v); }},
        {"g_x", [](RunConfig& c, const std::string& v) { c.material.g[0] = to_double(v); }},
        {"g_y", [](RunConfig& c, const std::string& v) { c.material.g[1] = to_double(v); }},
        {"eta_F", [](RunConfig& c, const std::string& v) { c.potential.eta_F = to_double(v); }},
        {"F_coeffs", [](RunConfig& c, const std::string& v) {
           std::vector<double> k;
           for (const auto& s : split_list(v)) k.push_back(to_double(s));
           c.potential.coeffs = std::move(k);
         }}}},
      {"kernel",
       {{"mode", [](RunConfig& c, const std::string& v) { c.solver.mode = parse_mode(v); }},
        {"epsilon", [](RunConfig& c, const std::string& v) { c.solver.epsilon = to_double(v); }},
        {"gamma", [](RunConfig& c, const std::string& v) { c.solver.gamma = to_double(v); }},
        {"shape", [](RunConfig& c, const std::string& v) { c.solver.shape = parse_mollifier_shape(v); }}}},
      {"solver",
       {{"dt", [](RunConfig& c, const std::string& v) {
           c.dt_auto = v == "auto";
           if (!c.dt_auto) c.solver.dt = to_double(v);
         }},
        {"t_end", [](RunConfig& c, const std::string& v) { c.solver.t_end = to_double(v); }},
        {"stabilization", [](RunConfig& c, const std::string& v) {
           c.solver.stabilization = v == "auto" ? -1.0 : to_double(v);
           if (v != "auto" && c.solver.stabilization < 0.0) throw Error("stabilization must be >= 0 or auto");
         }},
        {"safety", [](RunConfig& c, const std::string& v) { c.solver.safety = to_double(v); }},
        {"cadence", [](RunConfig& c, const std::string& v) { c.solver.cadence = to_int(v); }},
        {"check_invariants", [](RunConfig& c, const std::string& v) { c.solver.check_invariants = to_bool(v); }}}},
      {"initial",
       {{"type", [](RunConfig& c, const std::string& v) {
           if (v != "spinodal" && v != "cosine" && v != "constant" && v != "random" && v != "snapshot")
             throw Error("unknown initial type '" + v + "' (spinodal, cosine, constant, random, snapshot)");
           c.initial.type = v;
         }},
        {"amplitude", [](RunConfig& c, const std::string& v) { c.initial.amplitude = to_double(v); }},
        {"mean", [](RunConfig& c, const std::string& v) { c.initial.mean = to_double(v); }},
        {"noise", [](RunConfig& c, const std::string& v) { c.initial.noise = to_double(v); }},
        {"file", [](RunConfig& c, const std::string& v) { c.initial.file = v; }}}},
      {"forcing",
       {{"q", [](RunConfig& c, const std::string& v) { c.forcing.q = v; }},
        {"q_amplitude", [](RunConfig& c, const std::string& v) { c.forcing.q_amplitude = to_double(v); }},
        {"z", [](RunConfig& c, const std::string& v) { c.forcing.z = v; }},
        {"z_amplitude", [](RunConfig& c, const std::string& v) { c.forcing.z_amplitude = to_double(v); }}}},
      {"output",
       {{"directory", [](RunConfig& c, const std::string& v) { c.output.directory = v; }},
        {"formats", [](RunConfig& c, const std::string& v) {
           c.output.csv = c.output.ppm = c.output.snapshot = false;
           for (const auto& f : split_list(v)) {
             if (f == "csv")
               c.output.csv = true;
             else if (f == "ppm")
               c.output.ppm = true;
             else if (f == "snapshot")
               c.output.snapshot = true;
             else if (!f.empty())
               throw Error("unknown output format '" + f + "' (csv, ppm, snapshot)");
           }
         }}}},
  };
  return table;
}

bool is_preset(const std::string& v) { return v == "zero" || v == "constant" || v == "mode"; }

void cross_validate(RunConfig& c, std::vector<std::string>& errors) {
  auto collect = [&](auto&& check) {
    try {
      check();
    } catch (const Error& e) {
      errors.emplace_back(e.what());
    }
  };
  collect([&] { (void)c.grid(); });
  collect([&] { c.material.validate(); });
  collect([&] { c.potential.validate(); });
  // gamma is checked in either mode so a config can be switched without surprises
  if (!(c.solver.gamma > 0.0 && c.solver.gamma < 1.0))
    errors.emplace_back("kernel: gamma = " + format_double(c.solver.gamma) +
                        " is outside the admissible range (0, d-1) = (0, 1) for d = 2");
  collect([&] {
    SolverConfig s = c.solver;
    s.gamma = 0.5;
    s.validate();
  });
  if (c.solver.mode == Mode::kNonlocal && c.solver.epsilon > 0.0 && c.nx >= 2 && c.ny >= 2 && c.lx > 0 && c.ly > 0) {
    const double h = std::max(c.lx / c.nx, c.ly / c.ny);
    if (c.solver.epsilon < 2.0 * h)
      c.warnings.push_back("kernel: epsilon = " + format_double(c.solver.epsilon) + " is under-resolved (< 2 max(dx, dy) = " +
                           format_double(2.0 * h) + ")");
  }
  if (c.initial.type == "snapshot") {
    if (c.initial.file.empty())
      errors.emplace_back("initial: type = snapshot requires 'file'");
    else if (!std::filesystem::exists(c.initial.file))
      errors.emplace_back("initial: file '" + c.initial.file + "' does not exist");
  }
  if (!(c.initial.noise >= 0.0)) errors.emplace_back("initial: noise must be >= 0");
  for (const std::string* v : {&c.forcing.q, &c.forcing.z})
    if (!is_preset(*v) && !std::filesystem::exists(*v))
      errors.emplace_back("forcing: '" + *v + "' is neither a preset (zero, constant, mode) nor an existing file");
  if (c.output.directory.empty()) errors.emplace_back("output: directory must not be empty");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : Error([&] {
        std::string msg = "invalid configuration:";
        for (const auto& e : errors) msg += "\n  " + e;
        return msg;
      }()),
      errors_(std::move(errors)) {}

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::vector<std::string> errors;
  const auto& table = key_table();
  std::string section;
  std::map<std::string, int> seen;  // "section.key" -> line
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  bool section_ok = true;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::size_t hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        errors.push_back(where + "malformed section header '" + line + "'");
        section_ok = false;
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      section_ok = table.contains(section) && !section.empty();
      if (!section_ok) errors.push_back(where + "unknown section [" + section + "]");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back(where + "expected 'key = value'");
      continue;
    }
    if (!section_ok) continue;
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const std::string label = section.empty() ? key : "[" + section + "] " + key;
    const auto& keys = table.at(section);
    const auto it = keys.find(key);
    if (it == keys.end()) {
      errors.push_back(where + "unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"));
      continue;
    }
    const std::string full = section + "." + key;
    if (const auto prev = seen.find(full); prev != seen.end()) {
      errors.push_back(where + "duplicate key " + label + " (first set on line " + std::to_string(prev->second) + ")");
      continue;
    }
    seen[full] = line_no;
    try {
      it->second(c, value);
    } catch (const Error& e) {
      errors.push_back(where + label + ": " + e.what());
    }
  }
  for (const char* req : {"grid.nx", "grid.ny"})
    if (!seen.contains(req)) errors.push_back(std::string("missing required key [grid] ") + (req + 5));
  cross_validate(c, errors);
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_text(const RunConfig& c) {
  std::ostringstream o;
  auto d = [](double v) { return format_double(v); };
  o << "seed = " << c.seed << "\n\n";
  o << "[grid]\nnx = " << c.nx << "\nny = " << c.ny << "\nlx = " << d(c.lx) << "\nly = " << d(c.ly) << "\n\n";
  const MaterialParams& m = c.material;
  o << "[physics]\nK = " << d(m.K_cap) << "\nl_c = " << d(m.l_c) << "\nl_h = " << d(m.l_h) << "\nkappa = " << d(m.kappa)
    << "\nnu_min = " << d(m.nu_min) << "\nnu_max = " << d(m.nu_max) << "\nalpha0 = " << d(m.alpha0)
    << "\nalpha1 = " << d(m.alpha1) << "\nalpha2 = " << d(m.alpha2) << "\ng_x = " << d(m.g[0]) << "\ng_y = " << d(m.g[1])
    << "\neta_F = " << d(c.potential.eta_F) << "\nF_coeffs = ";
  for (std::size_t k = 0; k < c.potential.coeffs.size(); ++k) o << (k ? ", " : "") << d(c.potential.coeffs[k]);
  o << "\n\n[kernel]\nmode = " << to_string(c.solver.mode) << "\nepsilon = " << d(c.solver.epsilon)
    << "\ngamma = " << d(c.solver.gamma) << "\nshape = " << to_string(c.solver.shape) << "\n\n";
  o << "[solver]\ndt = " << (c.dt_auto ? std::string("auto") : d(c.solver.dt)) << "\nt_end = " << d(c.solver.t_end)
    << "\nstabilization = " << (c.solver.stabilization < 0.0 ? std::string("auto") : d(c.solver.stabilization))
    << "\nsafety = " << d(c.solver.safety) << "\ncadence = " << c.solver.cadence
    << "\ncheck_invariants = " << (c.solver.check_invariants ? "true" : "false") << "\n\n";
  o << "[initial]\ntype = " << c.initial.type << "\namplitude = " << d(c.initial.amplitude) << "\nmean = " << d(c.initial.mean)
    << "\nnoise = " << d(c.initial.noise) << "\n";
  if (!c.initial.file.empty()) o << "file = " << c.initial.file << "\n";
  o << "\n[forcing]\nq = " << c.forcing.q << "\nq_amplitude = " << d(c.forcing.q_amplitude) << "\nz = " << c.forcing.z
    << "\nz_amplitude = " << d(c.forcing.z_amplitude) << "\n\n";
  std::vector<std::string> formats;
  if (c.output.csv) formats.push_back("csv");
  if (c.output.ppm) formats.push_back("ppm");
  if (c.output.snapshot) formats.push_back("snapshot");
  o << "[output]\ndirectory = " << c.output.directory << "\nformats = ";
  for (std::size_t k = 0; k < formats.size(); ++k) o << (k ? ", " : "") << formats[k];
  o << "\n";
  return o.str();
}

SimState initial_state(const RunConfig& c) {
  const Grid g = c.grid();
  if (c.initial.type == "snapshot") {
    Snapshot snap = read_snapshot(c.initial.file);
    if (snap.state.grid() != g) throw Error("initial snapshot grid does not match the configuration");
    snap.state.t = 0.0;
    snap.state.step = 0;
    return snap.state;
  }
  SimState s(g);
  const double pi = std::numbers::pi, a = c.initial.amplitude, m = c.initial.mean;
  if (c.initial.type == "spinodal")
    s.phi = ScalarField::from_function(g, [&](double x, double y) { return a * std::cos(2 * pi * x / c.lx) * std::cos(pi * y / c.ly) + m; });
  else if (c.initial.type == "cosine")
    s.phi = ScalarField::from_function(g, [&](double x, double y) { return a * std::cos(pi * x / c.lx) * std::cos(pi * y / c.ly) + m; });
  else
    s.phi = ScalarField(g, m);
  if (c.initial.noise > 0.0) {
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> dist(-c.initial.noise, c.initial.noise);
    for (double& v : s.phi.values()) v += dist(rng);
  }
  return s;
}

Forcing make_forcing(const RunConfig& c) {
  const Grid g = c.grid();
  Forcing f(g);
  const double pi = std::numbers::pi;
  const std::string& q = c.forcing.q;
  if (q == "constant") {
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 1; i < g.nx(); ++i) f.q.u(i, j) = c.forcing.q_amplitude;
  } else if (q == "mode") {
    // curl of psi = sin^2(pi x/Lx) sin^2(pi y/Ly) at nodes: discretely divergence-free
    auto psi = [&](double x, double y) { return std::pow(std::sin(pi * x / c.lx) * std::sin(pi * y / c.ly), 2); };
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i <= g.nx(); ++i)
        f.q.u(i, j) = c.forcing.q_amplitude * (psi(i * g.dx(), (j + 1) * g.dy()) - psi(i * g.dx(), j * g.dy())) / g.dy();
    for (int j = 0; j <= g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i)
        f.q.v(i, j) = -c.forcing.q_amplitude * (psi((i + 1) * g.dx(), j * g.dy()) - psi(i * g.dx(), j * g.dy())) / g.dx();
  } else if (q != "zero") {
    const FieldFile file = read_field_file(q);
    const std::vector<double>* qu = file.find_field("qu");
    const std::vector<double>* qv = file.find_field("qv");
    if (!qu || !qv || qu->size() != f.q.u_values().size() || qv->size() != f.q.v_values().size())
      throw Error("forcing file '" + q + "' needs fields qu and qv matching the grid");
    std::copy(qu->begin(), qu->end(), f.q.u_values().begin());
    std::copy(qv->begin(), qv->end(), f.q.v_values().begin());
    f.q.apply_no_penetration();
  }
  const std::string& z = c.forcing.z;
  if (z == "constant") {
    f.z = ScalarField(g, c.forcing.z_amplitude);
  } else if (z == "mode") {
    f.z = ScalarField::from_function(
        g, [&](double x, double y) { return c.forcing.z_amplitude * std::cos(pi * x / c.lx) * std::cos(pi * y / c.ly); });
  } else if (z != "zero") {
    const FieldFile file = read_field_file(z);
    const std::vector<double>* zf = file.find_field("z");
    if (!zf || zf->size() != f.z.size()) throw Error("forcing file '" + z + "' needs a field z matching the grid");
    std::copy(zf->begin(), zf->end(), f.z.values().begin());
  }
  return f;
}

}  // namespace nlchb
