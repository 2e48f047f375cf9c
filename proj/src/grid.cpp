#include "nlchb/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nlchb {

namespace {

// Neumaier-compensated accumulator; fixed order keeps results reproducible.
class Sum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

Grid Grid::make(int nx, int ny, double lx, double ly) {
  if (nx < kMinCells || ny < kMinCells) {
    std::ostringstream msg;
    msg << "grid too small: nx=" << nx << ", ny=" << ny << " (need at least " << kMinCells << ")";
    throw Error(msg.str());
  }
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw Error("domain lengths must be positive and finite");
  return Grid(nx, ny, lx, ly);
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw Error(std::string("grid mismatch in ") + what);
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_, "ScalarField +=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_, "ScalarField -=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& x : values_) x *= s;
  return *this;
}

ScalarField& ScalarField::axpy(double s, const ScalarField& other) {
  require_same_grid(grid_, other.grid_, "ScalarField axpy");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * other.values_[k];
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

void MacVelocity::apply_no_penetration() {
  const int nx = grid_.nx(), ny = grid_.ny();
  for (int j = 0; j < ny; ++j) {
    u(0, j) = 0.0;
    u(nx, j) = 0.0;
  }
  for (int i = 0; i < nx; ++i) {
    v(i, 0) = 0.0;
    v(i, ny) = 0.0;
  }
}

bool MacVelocity::boundary_is_zero() const {
  const int nx = grid_.nx(), ny = grid_.ny();
  for (int j = 0; j < ny; ++j)
    if (u(0, j) != 0.0 || u(nx, j) != 0.0) return false;
  for (int i = 0; i < nx; ++i)
    if (v(i, 0) != 0.0 || v(i, ny) != 0.0) return false;
  return true;
}

bool MacVelocity::all_finite() const {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(u_.begin(), u_.end(), finite) && std::all_of(v_.begin(), v_.end(), finite);
}

double MacVelocity::max_abs() const {
  double m = 0.0;
  for (double x : u_) m = std::max(m, std::abs(x));
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

MacVelocity& MacVelocity::operator+=(const MacVelocity& other) { return axpy(1.0, other); }

MacVelocity& MacVelocity::operator*=(double s) {
  for (double& x : u_) x *= s;
  for (double& x : v_) x *= s;
  return *this;
}

MacVelocity& MacVelocity::axpy(double s, const MacVelocity& other) {
  require_same_grid(grid_, other.grid_, "MacVelocity axpy");
  for (std::size_t k = 0; k < u_.size(); ++k) u_[k] += s * other.u_[k];
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += s * other.v_[k];
  return *this;
}

ScalarField divergence(const MacVelocity& vel) {
  const Grid& g = vel.grid();
  ScalarField out(g);
  const double idx = 1.0 / g.dx(), idy = 1.0 / g.dy();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i)
      out(i, j) = (vel.u(i + 1, j) - vel.u(i, j)) * idx + (vel.v(i, j + 1) - vel.v(i, j)) * idy;
  return out;
}

MacVelocity face_gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  MacVelocity out(g);
  const double idx = 1.0 / g.dx(), idy = 1.0 / g.dy();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx(); ++i) out.u(i, j) = (f(i, j) - f(i - 1, j)) * idx;
  for (int j = 1; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) out.v(i, j) = (f(i, j) - f(i, j - 1)) * idy;
  return out;
}

std::pair<ScalarField, ScalarField> gradient_cc(const ScalarField& f) {
  const Grid& g = f.grid();
  const int nx = g.nx(), ny = g.ny();
  ScalarField gx(g), gy(g);
  // Even reflection: ghost(-1) = f(0), ghost(n) = f(n-1).
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double w = f(i > 0 ? i - 1 : 0, j);
      const double e = f(i < nx - 1 ? i + 1 : nx - 1, j);
      const double s = f(i, j > 0 ? j - 1 : 0);
      const double n = f(i, j < ny - 1 ? j + 1 : ny - 1);
      gx(i, j) = (e - w) / (2.0 * g.dx());
      gy(i, j) = (n - s) / (2.0 * g.dy());
    }
  return {std::move(gx), std::move(gy)};
}

double integral(const ScalarField& f) {
  Sum s;
  for (double x : f.values()) s.add(x);
  return s.value() * f.grid().cell_area();
}

double mean(const ScalarField& f) { return integral(f) / f.grid().area(); }

double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "inner");
  Sum s;
  for (std::size_t k = 0; k < a.size(); ++k) s.add(a[k] * b[k]);
  return s.value() * a.grid().cell_area();
}

double inner(const MacVelocity& a, const MacVelocity& b) {
  require_same_grid(a.grid(), b.grid(), "inner");
  Sum s;
  auto au = a.u_values(), bu = b.u_values();
  for (std::size_t k = 0; k < au.size(); ++k) s.add(au[k] * bu[k]);
  auto av = a.v_values(), bv = b.v_values();
  for (std::size_t k = 0; k < av.size(); ++k) s.add(av[k] * bv[k]);
  return s.value() * a.grid().cell_area();
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.values()) m = std::max(m, std::abs(x));
  return m;
}

double compact_dirichlet(const ScalarField& f) {
  const MacVelocity g = face_gradient(f);
  return inner(g, g);
}

Reductions field_reductions(const ScalarField& f) {
  Reductions r{};
  r.integral = integral(f);
  r.mean = r.integral / f.grid().area();
  r.l2_norm = std::sqrt(inner(f, f));
  const auto [gx, gy] = gradient_cc(f);
  r.h1_seminorm = std::sqrt(inner(gx, gx) + inner(gy, gy));
  return r;
}

}  // namespace nlchb
