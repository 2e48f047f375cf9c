#include "nlchb/spectral.hpp"

#include <cmath>
#include <numbers>

#include "fftw_support.hpp"

namespace nlchb {

using detail::RealBuffer;

namespace {

double eig_1d(int k, int n, double h) {
  return 2.0 * (1.0 - std::cos(k * std::numbers::pi / n)) / (h * h);
}

// Forward DCT-II of a cell field into buf (unnormalized FFTW convention, 4x the sum).
void dct_forward_raw(const ScalarField& f, RealBuffer& buf) {
  const Grid& g = f.grid();
  auto src = f.values();
  std::copy(src.begin(), src.end(), buf.data());
  fftw_execute_r2r(detail::r2r_plan(g.ny(), g.nx(), FFTW_REDFT10, FFTW_REDFT10), buf.data(),
                   buf.data());
}

ScalarField dct_inverse_raw(const Grid& g, RealBuffer& buf, double scale) {
  fftw_execute_r2r(detail::r2r_plan(g.ny(), g.nx(), FFTW_REDFT01, FFTW_REDFT01), buf.data(),
                   buf.data());
  ScalarField out(g);
  auto dst = out.values();
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = buf.data()[k] * scale;
  return out;
}

template <class Symbol>
ScalarField diagonal_cosine(const ScalarField& f, Symbol&& symbol_inverse) {
  const Grid& g = f.grid();
  RealBuffer buf(g.size());
  dct_forward_raw(f, buf);
  for (int l = 0; l < g.ny(); ++l)
    for (int k = 0; k < g.nx(); ++k) buf.data()[l * g.nx() + k] *= symbol_inverse(k, l);
  // forward raw = 4 * sum, inverse raw needs 1/(nx ny) on the plain sum
  return dct_inverse_raw(g, buf, 0.25 / static_cast<double>(g.size()));
}

}  // namespace

SpectralField dct2_transform(const ScalarField& field) {
  const Grid& g = field.grid();
  RealBuffer buf(g.size());
  dct_forward_raw(field, buf);
  SpectralField out(g);
  auto c = out.coeffs();
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = 0.25 * buf.data()[k];
  return out;
}

ScalarField dct2_inverse(const SpectralField& coeffs) {
  const Grid& g = coeffs.grid();
  RealBuffer buf(g.size());
  auto c = coeffs.coeffs();
  std::copy(c.begin(), c.end(), buf.data());
  return dct_inverse_raw(g, buf, 1.0 / static_cast<double>(g.size()));
}

double neumann_eigenvalue(const Grid& grid, int k, int l) {
  return eig_1d(k, grid.nx(), grid.dx()) + eig_1d(l, grid.ny(), grid.dy());
}

double neumann_spectral_radius(const Grid& grid) {
  return neumann_eigenvalue(grid, grid.nx() - 1, grid.ny() - 1);
}

ScalarField laplacian_neumann(const ScalarField& field) {
  const Grid& g = field.grid();
  ScalarField out = diagonal_cosine(field, [&](int k, int l) { return -neumann_eigenvalue(g, k, l); });
  return out;
}

ScalarField laplacian_stencil(const ScalarField& f) {
  const Grid& g = f.grid();
  const int nx = g.nx(), ny = g.ny();
  const double idx2 = 1.0 / (g.dx() * g.dx()), idy2 = 1.0 / (g.dy() * g.dy());
  ScalarField out(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double c = f(i, j);
      const double w = i > 0 ? f(i - 1, j) : c;
      const double e = i < nx - 1 ? f(i + 1, j) : c;
      const double s = j > 0 ? f(i, j - 1) : c;
      const double n = j < ny - 1 ? f(i, j + 1) : c;
      out(i, j) = (w - 2.0 * c + e) * idx2 + (s - 2.0 * c + n) * idy2;
    }
  return out;
}

ScalarField helmholtz_solve(double alpha, double beta, const ScalarField& rhs) {
  if (!(alpha > 0.0)) throw Error("helmholtz_solve: alpha must be positive");
  if (!(beta >= 0.0)) throw Error("helmholtz_solve: beta must be nonnegative");
  const Grid& g = rhs.grid();
  return diagonal_cosine(rhs,
                         [&](int k, int l) { return 1.0 / (alpha + beta * neumann_eigenvalue(g, k, l)); });
}

ScalarField poisson_neumann(const ScalarField& rhs) {
  const Grid& g = rhs.grid();
  return diagonal_cosine(rhs, [&](int k, int l) { return (k || l) ? -1.0 / neumann_eigenvalue(g, k, l) : 0.0; });
}

ScalarField spectral_solve(const SpectralField& symbol, const ScalarField& rhs) {
  require_same_grid(symbol.grid(), rhs.grid(), "spectral_solve");
  return diagonal_cosine(rhs, [&](int k, int l) { return 1.0 / symbol(k, l); });
}

ScalarField spectral_apply(const SpectralField& symbol, const ScalarField& field) {
  require_same_grid(symbol.grid(), field.grid(), "spectral_apply");
  return diagonal_cosine(field, [&](int k, int l) { return symbol(k, l); });
}

MacVelocity helmholtz_solve_velocity(double alpha, double beta, const MacVelocity& rhs) {
  if (!(alpha > 0.0)) throw Error("helmholtz_solve_velocity: alpha must be positive");
  if (!(beta >= 0.0)) throw Error("helmholtz_solve_velocity: beta must be nonnegative");
  const Grid& g = rhs.grid();
  const int nx = g.nx(), ny = g.ny();
  MacVelocity out(g);

  {  // u: rows j = 0..ny-1 (DST-II in y), interior faces i = 1..nx-1 (DST-I in x)
    const int n1 = nx - 1;
    RealBuffer buf(static_cast<std::size_t>(ny) * n1);
    for (int j = 0; j < ny; ++j)
      for (int a = 0; a < n1; ++a) buf.data()[j * n1 + a] = rhs.u(a + 1, j);
    fftw_execute_r2r(detail::r2r_plan(ny, n1, FFTW_RODFT10, FFTW_RODFT00), buf.data(), buf.data());
    const double norm = 1.0 / (4.0 * nx * ny);
    for (int b = 0; b < ny; ++b)
      for (int a = 0; a < n1; ++a) {
        const double lam = eig_1d(a + 1, nx, g.dx()) + eig_1d(b + 1, ny, g.dy());
        buf.data()[b * n1 + a] *= norm / (alpha + beta * lam);
      }
    fftw_execute_r2r(detail::r2r_plan(ny, n1, FFTW_RODFT01, FFTW_RODFT00), buf.data(), buf.data());
    for (int j = 0; j < ny; ++j)
      for (int a = 0; a < n1; ++a) out.u(a + 1, j) = buf.data()[j * n1 + a];
  }
  {  // v: interior rows j = 1..ny-1 (DST-I in y), columns i = 0..nx-1 (DST-II in x)
    const int n0 = ny - 1;
    RealBuffer buf(static_cast<std::size_t>(n0) * nx);
    for (int b = 0; b < n0; ++b)
      for (int i = 0; i < nx; ++i) buf.data()[b * nx + i] = rhs.v(i, b + 1);
    fftw_execute_r2r(detail::r2r_plan(n0, nx, FFTW_RODFT00, FFTW_RODFT10), buf.data(), buf.data());
    const double norm = 1.0 / (4.0 * nx * ny);
    for (int b = 0; b < n0; ++b)
      for (int a = 0; a < nx; ++a) {
        const double lam = eig_1d(a + 1, nx, g.dx()) + eig_1d(b + 1, ny, g.dy());
        buf.data()[b * nx + a] *= norm / (alpha + beta * lam);
      }
    fftw_execute_r2r(detail::r2r_plan(n0, nx, FFTW_RODFT00, FFTW_RODFT01), buf.data(), buf.data());
    for (int b = 0; b < n0; ++b)
      for (int i = 0; i < nx; ++i) out.v(i, b + 1) = buf.data()[b * nx + i];
  }
  return out;
}

MacVelocity laplacian_velocity(const MacVelocity& vel) {
  const Grid& g = vel.grid();
  const int nx = g.nx(), ny = g.ny();
  const double idx2 = 1.0 / (g.dx() * g.dx()), idy2 = 1.0 / (g.dy() * g.dy());
  MacVelocity out(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const double c = vel.u(i, j);
      const double s = j > 0 ? vel.u(i, j - 1) : -c;
      const double n = j < ny - 1 ? vel.u(i, j + 1) : -c;
      out.u(i, j) = (vel.u(i - 1, j) - 2.0 * c + vel.u(i + 1, j)) * idx2 + (s - 2.0 * c + n) * idy2;
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double c = vel.v(i, j);
      const double w = i > 0 ? vel.v(i - 1, j) : -c;
      const double e = i < nx - 1 ? vel.v(i + 1, j) : -c;
      out.v(i, j) = (w - 2.0 * c + e) * idx2 + (vel.v(i, j - 1) - 2.0 * c + vel.v(i, j + 1)) * idy2;
    }
  return out;
}

}  // namespace nlchb
