#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "nlchb/commands.hpp"
#include "nlchb/io.hpp"
#include "test_util.hpp"

using namespace nlchb;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nlchb_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) return true;
  return false;
}

std::vector<std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) r.push_back(std::stod(cell));
    rows.push_back(r);
  }
  return rows;
}

const char* kMinimal = "[grid]\nnx = 16\nny = 16\n";

}  // namespace

TEST_CASE("minimal config takes the documented defaults") {
  const RunConfig c = parse_config(kMinimal);
  CHECK(c.nx == 16);
  CHECK(c.lx == 1.0);
  CHECK(c.solver.mode == Mode::kNonlocal);
  CHECK(c.solver.epsilon == 0.1);
  CHECK(c.solver.gamma == 0.5);
  CHECK(c.material.nu_min == 0.5);
  CHECK(c.potential.coeffs == std::vector<double>{0.25, 0.0, -0.5, 0.0, 0.25});
  CHECK(c.initial.type == "spinodal");
  CHECK(c.forcing.q == "zero");
  CHECK(c.output.csv);
  CHECK(c.warnings.size() == 1);  // 0.1 < 2/16
  CHECK(parse_config("[grid]\nnx = 64\nny = 64\n").warnings.empty());
}

TEST_CASE("config errors are collected, not first-only") {
  const auto errs = errors_of(
      "[grid]\nnx = 16\nny = 16\nnx = 8\n"
      "[kernel]\ngamma = 1.5\nepsilonn = 0.1\n"
      "[physics]\nnu_min = abc\n"
      "[bogus]\nx = 1\n");
  CHECK(any_contains(errs, "line 4: duplicate key [grid] nx (first set on line 2)"));
  CHECK(any_contains(errs, "(0, d-1)"));
  CHECK(any_contains(errs, "line 7: unknown key 'epsilonn' in [kernel]"));
  CHECK(any_contains(errs, "line 9: [physics] nu_min: expected a number"));
  CHECK(any_contains(errs, "unknown section [bogus]"));
  CHECK(errs.size() == 5);

  const auto missing = errors_of("[solver]\ndt = 0\n");
  CHECK(any_contains(missing, "missing required key [grid] nx"));
  CHECK(any_contains(missing, "missing required key [grid] ny"));
  CHECK(any_contains(missing, "dt must be positive"));
  CHECK(any_contains(errors_of(std::string(kMinimal) + "[forcing]\nz = /no/such/file\n"), "neither a preset"));
  CHECK(any_contains(errors_of(std::string(kMinimal) + "[initial]\ntype = snapshot\n"), "requires 'file'"));
}

TEST_CASE("config text round trip") {
  RunConfig c = parse_config(std::string("seed = 1\n") + kMinimal +
                             "[physics]\nF_coeffs = 0.1, 0, -0.3, 0, 0.7\neta_F = 0.3\ng_x = 0.1\n"
                             "[kernel]\nmode = local\nshape = quartic\n[solver]\ndt = auto\nt_end = 0.3\n"
                             "stabilization = 2.5\n[output]\nformats = csv\n");
  const std::string text = to_text(c);
  const RunConfig back = parse_config(text);
  CHECK(to_text(back) == text);
  CHECK(back.solver.mode == Mode::kLocal);
  CHECK(back.solver.shape == MollifierShape::kQuartic);
  CHECK(back.dt_auto);
  CHECK(back.potential.coeffs == c.potential.coeffs);
  CHECK_FALSE(back.output.ppm);
  c.solver.dt = 0.1 + 0.2;  // not representable in short decimal
  c.dt_auto = false;
  CHECK(parse_config(to_text(c)).solver.dt == c.solver.dt);
}

TEST_CASE("snapshot round trip is bit-exact") {
  const fs::path dir = scratch("snap");
  const Grid g = Grid::make(12, 9, 1.3, 0.7);
  SimState s(g);
  s.t = 0.1 + 0.2;
  s.step = 123456789012;
  s.phi = testing::random_field(g, 1);
  s.theta = testing::random_field(g, 2);
  s.u = testing::random_velocity(g, 3);
  s.mu = testing::random_field(g, 4);
  s.phi(0, 0) = -0.0;
  s.theta(1, 1) = std::numeric_limits<double>::denorm_min();
  const SnapshotMeta meta{Mode::kNonlocal, 0.15, 0.5, 1.0 / 3.0, "line one\nline two\n"};
  const std::string path = (dir / "s.nlchb").string();
  write_snapshot(s, meta, path);
  const Snapshot back = read_snapshot(path);
  CHECK(back.state == s);
  CHECK(std::signbit(back.state.phi(0, 0)));
  CHECK(back.meta.dt == meta.dt);
  CHECK(back.meta.config == meta.config);
  CHECK(back.state.grid() == g);

  std::ifstream in(path, std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(bytes.rfind("NLCHB1\n", 0) == 0);
  for (std::size_t cut : {bytes.size() - 1, bytes.size() - 800, std::size_t{40}, std::size_t{3}}) {
    const std::string tp = (dir / "cut.nlchb").string();
    std::ofstream(tp, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(cut));
    CHECK_THROWS_AS(read_snapshot(tp), Error);
  }
  CHECK_THROWS_AS(read_snapshot((dir / "missing.nlchb").string()), Error);
}

TEST_CASE("ledger csv and ppm") {
  const fs::path dir = scratch("csv");
  const Grid g = Grid::make(8, 10, 1.0, 1.0);
  {
    CsvLedgerWriter w((dir / "l.csv").string());
    LedgerRow r{};
    r.t = 0.1;
    r.E_total = 1.0 / 3.0;
    w.write(r);
  }
  {
    CsvLedgerWriter w((dir / "l.csv").string());  // appends without a second header
    LedgerRow r{};
    r.t = 0.2;
    w.write(r);
  }
  std::ifstream in(dir / "l.csv");
  std::string header, line;
  std::getline(in, header);
  CHECK(header.rfind("t,E_total,E_interface,F_integral,kinetic,thermal,dissipation,work_q,work_buoy,work_z,work_gu,"
                     "residual,mass_phi,mean_h,max_div_u,max_u,dt_used",
                     0) == 0);
  const auto rows = read_csv(dir / "l.csv");
  CHECK(rows.size() == 2);
  CHECK(rows[0][1] == 1.0 / 3.0);

  write_ppm(testing::random_field(g, 1), 1.0, (dir / "f.ppm").string());
  CHECK(fs::file_size(dir / "f.ppm") == std::string("P6\n8 10\n255\n").size() + 8 * 10 * 3);
}

TEST_CASE("run command: rest state keeps its energy") {
  const fs::path dir = scratch("rest");
  RunConfig c = parse_config(std::string(kMinimal) +
                             "[kernel]\nepsilon = 0.2\n[initial]\ntype = constant\nmean = 0.3\n"
                             "[solver]\ndt = 0.001\nt_end = 0.1\ncadence = 1\n[output]\nformats = csv\n");
  std::ostringstream log;
  CommandEnv env{dir.string(), 1, &log};
  CHECK(cmd_run(c, env) == kExitOk);
  const auto rows = read_csv(dir / "ledger.csv");
  CHECK(rows.size() == 101);
  for (const auto& r : rows) CHECK(std::abs(r[1] - rows[0][1]) <= 1e-12);
  CHECK(rows[0][1] == doctest::Approx(potential_eval(c.potential, 0.3).F));
  CHECK(fs::exists(dir / "checkpoint.nlchb"));
  CHECK(fs::exists(dir / "validation.json"));
}

TEST_CASE("run command: blow-up leaves a snapshot and a nonzero exit") {
  const fs::path dir = scratch("blowup");
  RunConfig c = parse_config(std::string(kMinimal) +
                             "[physics]\nnu_min = 0.001\nnu_max = 0.002\n[kernel]\nepsilon = 0.2\n"
                             "[solver]\ndt = 1\nt_end = 100\n[forcing]\nq = mode\nq_amplitude = 1000\n"
                             "[output]\nformats = csv\n");
  std::ostringstream log;
  CHECK(cmd_run(c, CommandEnv{dir.string(), 1, &log}) == kExitBlowUp);
  CHECK(fs::exists(dir / "blowup.nlchb"));
  CHECK(fs::exists(dir / "blowup.txt"));
  CHECK(read_snapshot((dir / "blowup.nlchb").string()).state.all_finite());
}

TEST_CASE("resume reproduces the uninterrupted run bit-exactly") {
  const fs::path full = scratch("full"), part = scratch("part");
  const std::string text = std::string(kMinimal) +
                           "[physics]\ng_y = -1\n[kernel]\nepsilon = 0.2\n[initial]\nnoise = 0.05\n"
                           "[solver]\ndt = 0.002\nt_end = 0.08\ncadence = 20\n[forcing]\nz = mode\n"
                           "[output]\nformats = snapshot\n";
  std::ostringstream log;
  CHECK(cmd_run(parse_config(text), CommandEnv{full.string(), 1, &log}) == kExitOk);
  // restart from the mid-run snapshot in a different directory
  const fs::path mid = full / "snap_00000020.nlchb";
  REQUIRE(fs::exists(mid));
  CHECK(cmd_resume(mid.string(), CommandEnv{part.string(), 1, &log}) == kExitOk);
  const Snapshot a = read_snapshot((full / "checkpoint.nlchb").string());
  const Snapshot b = read_snapshot((part / "checkpoint.nlchb").string());
  CHECK(a.state.step == 40);
  CHECK(a.state == b.state);
}

TEST_CASE("oracle and validate commands") {
  std::ostringstream log;
  const RunConfig small = parse_config("[grid]\nnx = 16\nny = 16\n[kernel]\nepsilon = 0.25\n");
  CHECK(cmd_oracle(small, CommandEnv{"", 1, &log}) == kExitOk);
  CHECK(log.str().find("FAIL") == std::string::npos);
  std::ostringstream bad;
  CHECK(cmd_oracle(small, CommandEnv{"", 1, &bad}, OracleHooks{true}) == kExitFailed);
  CHECK(bad.str().find("kernel symmetry J(x) = J(-x)") != std::string::npos);
  CHECK(bad.str().find("FAIL") != std::string::npos);
  CHECK_THROWS_AS(cmd_oracle(parse_config("[grid]\nnx = 64\nny = 64\n"), CommandEnv{"", 1, &log}), Error);

  std::ostringstream v;
  CHECK(cmd_validate(small, CommandEnv{"", 1, &v}) == kExitOk);
  CHECK(v.str().find("\"all_ok\": true") != std::string::npos);
}

TEST_CASE("environment overrides") {
  setenv("NLCHB_THREADS", "3", 1);
  setenv("NLCHB_OUTPUT_DIR", "/tmp/x", 1);
  const CommandEnv env = env_from_environment();
  CHECK(env.threads == 3);
  CHECK(env.output_dir == "/tmp/x");
  setenv("NLCHB_THREADS", "zero", 1);
  CHECK_THROWS_AS(env_from_environment(), Error);
  unsetenv("NLCHB_THREADS");
  unsetenv("NLCHB_OUTPUT_DIR");
}
