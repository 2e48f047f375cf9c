#include "nlchb/kernel.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fftw_support.hpp"

namespace nlchb {

namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr double kPi = std::numbers::pi;

template <class F>
double gk(F&& f, double a, double b, double tol = 1e-13, double* err = nullptr) {
  if (!(b > a)) return 0.0;
  double e = 0.0;
  const double v = gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol, &e);
  if (err) *err = e;
  return v;
}

// Composite 16-point Gauss-Legendre, doubling the panel count until two
// successive levels agree to rel_tol (or abs_tol).
template <class F>
double composite_gl(F&& f, double a, double b, double rel_tol, double abs_tol) {
  using rule = boost::math::quadrature::gauss<double, 16>;
  auto level = [&](int panels) {
    const double h = (b - a) / panels;
    double s = 0.0;
    for (int p = 0; p < panels; ++p) s += rule::integrate(f, a + p * h, a + (p + 1) * h);
    return s;
  };
  double prev = level(1);
  for (int panels = 2; panels <= 256; panels *= 2) {
    const double cur = level(panels);
    if (std::abs(cur - prev) <= std::max(rel_tol * std::abs(cur), abs_tol)) return cur;
    prev = cur;
  }
  return prev;
}

// Average of J over the cell [x0,x1] x [y0,y1] away from the origin, by
// tensor Gauss-Legendre refined to 1e-8 relative (absolute floor relative to
// the kernel's peak scale, since cells near the support edge carry tiny mass).
double cell_average(const Mollifier& m, double eps, double x0, double x1, double y0, double y1) {
  const double floor = 1e-14 * kernel_radial(m, eps, 0.5 * eps) * (x1 - x0) * (y1 - y0);
  auto inner = [&](double x) {
    return composite_gl([&](double y) { return kernel_radial(m, eps, std::hypot(x, y)); }, y0, y1, 1e-10,
                        floor / (x1 - x0));
  };
  return composite_gl(inner, x0, x1, 1e-8, floor) / ((x1 - x0) * (y1 - y0));
}

// Average of J over the cell centred at the origin with half-widths hx, hy.
// Polar coordinates about the singular corner of each quadrant; the radial
// integral of r^{1-gamma} eta(r/eps) uses r = R t^{1/(2-gamma)}, which leaves a
// smooth integrand in t.
double origin_cell_average(const Mollifier& m, double eps, double hx, double hy) {
  const double g = m.gamma;
  const double p = 1.0 / (2.0 - g);
  const double scale = std::pow(eps, g - 2.0 - m.dim);
  auto radial = [&](double R) {
    const double tmax = std::min(1.0, std::pow(eps / R, 2.0 - g));
    const double v =
        composite_gl([&](double t) { return m(R * std::pow(t, p) / eps); }, 0.0, tmax, 1e-12, 1e-300);
    return std::pow(R, 2.0 - g) / (2.0 - g) * v;
  };
  const double split = std::atan2(hy, hx);
  const double lower =
      composite_gl([&](double th) { return radial(hx / std::cos(th)); }, 0.0, split, 1e-11, 1e-300);
  const double upper = composite_gl([&](double th) { return radial(hy / std::sin(th)); }, split,
                                    kPi / 2.0, 1e-11, 1e-300);
  return 4.0 * scale * (lower + upper) / (4.0 * hx * hy);
}

}  // namespace

double compute_cd(int d) {
  if (d == 2) return gk([](double t) { return std::cos(t) * std::cos(t); }, 0.0, 2.0 * kPi, 1e-15);
  if (d == 3) {
    // sigma = (sin th cos ph, sin th sin ph, cos th), surface element sin th.
    auto over_theta = [](double ph) {
      return gk(
          [ph](double th) {
            const double c = std::sin(th) * std::cos(ph);
            return c * c * std::sin(th);
          },
          0.0, kPi, 1e-15);
    };
    return gk(over_theta, 0.0, 2.0 * kPi, 1e-15);
  }
  throw Error("compute_cd: only d = 2 and d = 3 are supported");
}

std::string to_string(MollifierShape shape) {
  switch (shape) {
    case MollifierShape::kBump:
      return "bump";
    case MollifierShape::kQuartic:
      return "quartic";
  }
  return "unknown";
}

MollifierShape parse_mollifier_shape(const std::string& name) {
  if (name == "bump") return MollifierShape::kBump;
  if (name == "quartic") return MollifierShape::kQuartic;
  throw Error("unknown mollifier shape '" + name + "' (expected bump or quartic)");
}

double Mollifier::base(double s) const {
  if (s < 0.0) s = -s;
  if (s >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  switch (shape) {
    case MollifierShape::kBump:
      return std::exp(-1.0 / q);
    case MollifierShape::kQuartic:
      return q * q;
  }
  return 0.0;
}

double Mollifier::operator()(double s) const { return c_eta * base(s); }

double Mollifier::derivative(double s) const {
  if (s >= 1.0 || s < 0.0) return 0.0;
  const double q = 1.0 - s * s;
  if (q <= 0.0) return 0.0;
  switch (shape) {
    case MollifierShape::kBump:
      return c_eta * std::exp(-1.0 / q) * (-2.0 * s / (q * q));
    case MollifierShape::kQuartic:
      return c_eta * (-4.0 * s * q);
  }
  return 0.0;
}

Mollifier calibrate_mollifier(double gamma, int d, MollifierShape shape) {
  if (d != 2 && d != 3) throw Error("calibrate_mollifier: d must be 2 or 3");
  if (!(gamma > 0.0 && gamma < d - 1)) {
    std::ostringstream msg;
    msg << "calibrate_mollifier: gamma = " << gamma << " outside (0, d-1) = (0, " << d - 1 << ")";
    throw Error(msg.str());
  }
  Mollifier m{gamma, d, shape, 1.0};
  double err = 0.0;
  const double moment =
      gk([&](double s) { return m.base(s) * std::pow(s, d + 1 - gamma); }, 0.0, 1.0, 1e-15, &err);
  if (!(moment > 0.0) || err > 1e-10 * moment)
    throw Error("calibrate_mollifier: renormalization quadrature did not converge");
  m.c_eta = (2.0 / compute_cd(d)) / moment;
  return m;
}

double renormalization_integral(const Mollifier& m) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate([&](double s) { return m(s) * std::pow(s, m.dim + 1 - m.gamma); }, 0.0, 1.0);
}

double kernel_radial(const Mollifier& m, double epsilon, double r) {
  if (r >= epsilon) return 0.0;
  return std::pow(epsilon, m.gamma - 2.0 - m.dim) * m(r / epsilon) * std::pow(r, -m.gamma);
}

double kernel_l1_exact(const Mollifier& m, double epsilon) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double v = ts.integrate([&](double s) { return m(s) * std::pow(s, 1.0 - m.gamma); }, 0.0, 1.0);
  return 2.0 * kPi * v / (epsilon * epsilon);
}

KernelGrid::KernelGrid(const Grid& grid, const Mollifier& mollifier, double epsilon)
    : grid_(grid), mollifier_(mollifier), epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error("sample_kernel: epsilon must be positive");
  if (mollifier.dim != 2) throw Error("sample_kernel: only d = 2 kernels can be sampled");
  const double dx = grid.dx(), dy = grid.dy();
  if (epsilon < 2.0 * std::max(dx, dy)) {
    resolved_ = false;
    std::ostringstream msg;
    msg << "kernel under-resolved: epsilon = " << epsilon << " < 2*max(dx,dy) = " << 2.0 * std::max(dx, dy);
    warnings_.push_back(msg.str());
  }
  if (epsilon > std::min(grid.lx(), grid.ly())) {
    std::ostringstream msg;
    msg << "kernel support (epsilon = " << epsilon << ") exceeds the domain size";
    warnings_.push_back(msg.str());
  }

  const int nx = grid.nx(), ny = grid.ny();
  const int lnx = 2 * nx - 1;
  values_.assign(static_cast<std::size_t>(lnx) * (2 * ny - 1), 0.0);
  for (int n = 0; n < ny; ++n) {
    for (int m = 0; m < nx; ++m) {
      const double x = m * dx, y = n * dy;
      const double rmin = std::hypot(std::max(0.0, x - 0.5 * dx), std::max(0.0, y - 0.5 * dy));
      if (rmin >= epsilon) continue;
      // Every cell in the support is averaged, not only the origin and cut
      // cells: pointwise sampling of r^{-gamma} loses ~1e-3 of the L1 mass.
      const double value =
          (m == 0 && n == 0)
              ? origin_cell_average(mollifier_, epsilon, 0.5 * dx, 0.5 * dy)
              : cell_average(mollifier_, epsilon, x - 0.5 * dx, x + 0.5 * dx, y - 0.5 * dy, y + 0.5 * dy);
      for (int sn : {-1, 1})
        for (int sm : {-1, 1})
          values_[static_cast<std::size_t>(sn * n + ny - 1) * lnx + (sm * m + nx - 1)] = value;
    }
  }
  build_spectrum();
}

KernelGrid::KernelGrid(const Grid& grid, std::vector<double> values, double epsilon, const Mollifier& m)
    : grid_(grid), mollifier_(m), epsilon_(epsilon), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(2 * grid.nx() - 1) * (2 * grid.ny() - 1))
    throw Error("KernelGrid::from_lattice: wrong lattice size");
  build_spectrum();
}

KernelGrid KernelGrid::from_lattice(const Grid& grid, std::vector<double> values, double epsilon,
                                    double gamma) {
  Mollifier m;
  m.gamma = gamma;
  return KernelGrid(grid, std::move(values), epsilon, m);
}

double KernelGrid::at(int m, int n) const {
  const int nx = grid_.nx(), ny = grid_.ny();
  if (m <= -nx || m >= nx || n <= -ny || n >= ny) return 0.0;
  return values_[static_cast<std::size_t>(n + ny - 1) * lattice_nx() + (m + nx - 1)];
}

void KernelGrid::build_spectrum() {
  const int nx = grid_.nx(), ny = grid_.ny();
  const int px = 2 * nx, py = 2 * ny;
  detail::RealBuffer padded(static_cast<std::size_t>(px) * py);
  std::fill(padded.data(), padded.data() + padded.size(), 0.0);
  const double w = grid_.cell_area();
  for (int n = -(ny - 1); n < ny; ++n)
    for (int m = -(nx - 1); m < nx; ++m) {
      const int ix = (m + px) % px, iy = (n + py) % py;
      padded.data()[static_cast<std::size_t>(iy) * px + ix] = at(m, n) * w;
    }
  const std::size_t nc = static_cast<std::size_t>(py) * (px / 2 + 1);
  detail::ComplexBuffer out(nc);
  fftw_execute_dft_r2c(detail::r2c_plan(py, px), padded.data(), out.data());
  auto spec = std::make_shared<std::vector<std::complex<double>>>(nc);
  const double scale = 1.0 / (static_cast<double>(px) * py);
  for (std::size_t k = 0; k < nc; ++k) (*spec)[k] = {out.data()[k][0] * scale, out.data()[k][1] * scale};
  spectrum_ = std::move(spec);
}

std::vector<double> KernelGrid::reflected_symbol() const {
  const int nx = grid_.nx(), ny = grid_.ny();
  // Support bounds of the lattice.
  int mmax = 0, nmax = 0;
  for (int n = 0; n < ny; ++n)
    for (int m = 0; m < nx; ++m)
      if (at(m, n) != 0.0) {
        mmax = std::max(mmax, m);
        nmax = std::max(nmax, n);
      }
  const double w = grid_.cell_area();
  double total = 0.0;
  for (double v : values_) total += v;
  total *= w;
  // rows[n][k] = sum_m J(m, n) cos(k pi m / nx)
  std::vector<double> rows(static_cast<std::size_t>(nmax + 1) * nx, 0.0);
  for (int n = 0; n <= nmax; ++n)
    for (int k = 0; k < nx; ++k) {
      double s = at(0, n);
      for (int m = 1; m <= mmax; ++m) s += 2.0 * at(m, n) * std::cos(kPi * k * m / nx);
      rows[static_cast<std::size_t>(n) * nx + k] = s;
    }
  std::vector<double> symbol(grid_.size());
  for (int l = 0; l < ny; ++l)
    for (int k = 0; k < nx; ++k) {
      double s = rows[k];
      for (int n = 1; n <= nmax; ++n)
        s += 2.0 * rows[static_cast<std::size_t>(n) * nx + k] * std::cos(kPi * l * n / ny);
      symbol[static_cast<std::size_t>(l) * nx + k] = total - s * w;
    }
  symbol[0] = 0.0;
  return symbol;
}

KernelGrid sample_kernel(const Mollifier& mollifier, double epsilon, const Grid& grid) {
  return KernelGrid(grid, mollifier, epsilon);
}

ScalarField convolve(const KernelGrid& kernel, const ScalarField& field) {
  require_same_grid(kernel.grid(), field.grid(), "convolve");
  const Grid& g = field.grid();
  const int nx = g.nx(), ny = g.ny();
  const int px = 2 * nx, py = 2 * ny;
  detail::RealBuffer padded(static_cast<std::size_t>(px) * py);
  std::fill(padded.data(), padded.data() + padded.size(), 0.0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) padded.data()[static_cast<std::size_t>(j) * px + i] = field(i, j);
  const std::size_t nc = static_cast<std::size_t>(py) * (px / 2 + 1);
  detail::ComplexBuffer spec(nc);
  fftw_execute_dft_r2c(detail::r2c_plan(py, px), padded.data(), spec.data());
  const auto& ks = kernel.spectrum();
  for (std::size_t k = 0; k < nc; ++k) {
    const std::complex<double> z = std::complex<double>(spec.data()[k][0], spec.data()[k][1]) * ks[k];
    spec.data()[k][0] = z.real();
    spec.data()[k][1] = z.imag();
  }
  fftw_execute_dft_c2r(detail::c2r_plan(py, px), spec.data(), padded.data());
  ScalarField out(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) out(i, j) = padded.data()[static_cast<std::size_t>(j) * px + i];
  return out;
}

ScalarField convolve_direct(const KernelGrid& kernel, const ScalarField& field) {
  require_same_grid(kernel.grid(), field.grid(), "convolve_direct");
  const Grid& g = field.grid();
  if (g.size() > 4096) throw Error("convolve_direct: grid larger than 4096 cells");
  ScalarField out(g);
  const double w = g.cell_area();
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      double s = 0.0;
      for (int jj = 0; jj < g.ny(); ++jj)
        for (int ii = 0; ii < g.nx(); ++ii) s += kernel.at(i - ii, j - jj) * field(ii, jj);
      out(i, j) = s * w;
    }
  return out;
}

double CoefficientA::max() const {
  auto v = values_.values();
  return *std::max_element(v.begin(), v.end());
}

double CoefficientA::min() const {
  auto v = values_.values();
  return *std::min_element(v.begin(), v.end());
}

CoefficientA compute_a(const KernelGrid& kernel) {
  ScalarField a = convolve(kernel, ScalarField(kernel.grid(), 1.0));
  for (double x : a.values())
    if (x < -1e-14) throw Error("compute_a: negative a(x); kernel sampling is broken");
  return CoefficientA(std::move(a));
}

KernelNorms kernel_norms(const KernelGrid& kernel) {
  const Grid& g = kernel.grid();
  const double dx = g.dx(), dy = g.dy(), w = g.cell_area();
  double l1 = 0.0;
  for (double v : kernel.lattice()) l1 += std::abs(v);
  l1 *= w;

  // Centered differences outside the 3x3 block around the origin; the block is
  // replaced by the radial integral of |J'| over a disc of equal area.
  double grad = 0.0;
  const int nx = g.nx(), ny = g.ny();
  for (int n = -(ny - 1); n < ny; ++n)
    for (int m = -(nx - 1); m < nx; ++m) {
      if (std::abs(m) <= 1 && std::abs(n) <= 1) continue;
      const double gx = (kernel.at(m + 1, n) - kernel.at(m - 1, n)) / (2.0 * dx);
      const double gy = (kernel.at(m, n + 1) - kernel.at(m, n - 1)) / (2.0 * dy);
      grad += std::hypot(gx, gy);
    }
  grad *= w;
  if (kernel.epsilon() > 0.0) {
    const Mollifier& mol = kernel.mollifier();
    const double eps = kernel.epsilon();
    const double r0 = std::min(std::sqrt(9.0 * w / kPi), eps);
    auto dj = [&](double r) {
      const double s = r / eps;
      const double scale = std::pow(eps, mol.gamma - 2.0 - mol.dim);
      return scale * (mol.derivative(s) / eps * std::pow(r, -mol.gamma) -
                      mol.gamma * mol(s) * std::pow(r, -mol.gamma - 1.0));
    };
    // r = r0 t^{1/(1-gamma)} absorbs the r^{-gamma} singularity of |J'| r.
    const double p = 1.0 / (1.0 - mol.gamma);
    auto integrand = [&](double t) {
      if (t <= 0.0) t = 1e-300;
      const double r = r0 * std::pow(t, p);
      return std::abs(dj(r)) * r * r0 * p * std::pow(t, p - 1.0);
    };
    grad += 2.0 * kPi * composite_gl(integrand, 0.0, 1.0, 1e-10, 0.0);
  }
  return {l1, grad};
}

}  // namespace nlchb
