#include "nlchb/mac.hpp"

namespace nlchb {

NodeField cell_to_node(const ScalarField& f) {
  const Grid& g = f.grid();
  const int nx = g.nx(), ny = g.ny();
  NodeField out(g);
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      double s = 0.0;
      int c = 0;
      for (int dj = -1; dj <= 0; ++dj)
        for (int di = -1; di <= 0; ++di) {
          const int ci = i + di, cj = j + dj;
          if (ci < 0 || cj < 0 || ci >= nx || cj >= ny) continue;
          s += f(ci, cj);
          ++c;
        }
      out(i, j) = s / c;
    }
  return out;
}

MacVelocity cell_to_face(const ScalarField& f) {
  const Grid& g = f.grid();
  const int nx = g.nx(), ny = g.ny();
  MacVelocity out(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const int l = i > 0 ? i - 1 : 0, r = i < nx ? i : nx - 1;
      out.u(i, j) = 0.5 * (f(l, j) + f(r, j));
    }
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int b = j > 0 ? j - 1 : 0, t = j < ny ? j : ny - 1;
      out.v(i, j) = 0.5 * (f(i, b) + f(i, t));
    }
  return out;
}

std::pair<ScalarField, ScalarField> face_to_cell(const MacVelocity& u) {
  const Grid& g = u.grid();
  ScalarField cu(g), cv(g);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      cu(i, j) = 0.5 * (u.u(i, j) + u.u(i + 1, j));
      cv(i, j) = 0.5 * (u.v(i, j) + u.v(i, j + 1));
    }
  return {std::move(cu), std::move(cv)};
}

namespace {

struct Strain {
  ScalarField xx, yy;
  NodeField xy;
};

Strain strain(const MacVelocity& u) {
  const Grid& g = u.grid();
  const int nx = g.nx(), ny = g.ny();
  const double dx = g.dx(), dy = g.dy();
  Strain s{ScalarField(g), ScalarField(g), NodeField(g)};
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      s.xx(i, j) = (u.u(i + 1, j) - u.u(i, j)) / dx;
      s.yy(i, j) = (u.v(i, j + 1) - u.v(i, j)) / dy;
    }
  // no-slip ghosts: tangential components reflect oddly across the walls
  auto uu = [&](int i, int j) {
    if (j < 0) return -u.u(i, 0);
    if (j >= ny) return -u.u(i, ny - 1);
    return u.u(i, j);
  };
  auto vv = [&](int i, int j) {
    if (i < 0) return -u.v(0, j);
    if (i >= nx) return -u.v(nx - 1, j);
    return u.v(i, j);
  };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      s.xy(i, j) = 0.5 * ((uu(i, j) - uu(i, j - 1)) / dy + (vv(i, j) - vv(i - 1, j)) / dx);
  return s;
}

}  // namespace

double strain_norm_sq(const MacVelocity& u, const ScalarField& nu_cell, const NodeField& nu_node) {
  const Grid& g = u.grid();
  const int nx = g.nx(), ny = g.ny();
  const Strain s = strain(u);
  double cells = 0.0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) cells += nu_cell(i, j) * (s.xx(i, j) * s.xx(i, j) + s.yy(i, j) * s.yy(i, j));
  double nodes = 0.0;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const double w = ((i == 0 || i == nx) ? 0.5 : 1.0) * ((j == 0 || j == ny) ? 0.5 : 1.0);
      nodes += w * nu_node(i, j) * 2.0 * s.xy(i, j) * s.xy(i, j);
    }
  return (cells + nodes) * g.cell_area();
}

MacVelocity stress_divergence(const MacVelocity& u, const ScalarField& nu_cell, const NodeField& nu_node) {
  const Grid& g = u.grid();
  const int nx = g.nx(), ny = g.ny();
  const double dx = g.dx(), dy = g.dy();
  const Strain s = strain(u);
  auto sxx = [&](int i, int j) { return 2.0 * nu_cell(i, j) * s.xx(i, j); };
  auto syy = [&](int i, int j) { return 2.0 * nu_cell(i, j) * s.yy(i, j); };
  auto sxy = [&](int i, int j) { return 2.0 * nu_node(i, j) * s.xy(i, j); };
  MacVelocity out(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i)
      out.u(i, j) = (sxx(i, j) - sxx(i - 1, j)) / dx + (sxy(i, j + 1) - sxy(i, j)) / dy;
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      out.v(i, j) = (syy(i, j) - syy(i, j - 1)) / dy + (sxy(i + 1, j) - sxy(i, j)) / dx;
  return out;
}

ScalarField advect_scalar(const MacVelocity& u, const ScalarField& f) {
  const Grid& g = f.grid();
  require_same_grid(u.grid(), g, "advect_scalar");
  const int nx = g.nx(), ny = g.ny();
  const double dx = g.dx(), dy = g.dy();
  ScalarField out(g);
  // x fluxes through interior faces
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const double flux = u.u(i, j) * 0.5 * (f(i - 1, j) + f(i, j)) / dx;
      out(i - 1, j) += flux;
      out(i, j) -= flux;
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double flux = u.v(i, j) * 0.5 * (f(i, j - 1) + f(i, j)) / dy;
      out(i, j - 1) += flux;
      out(i, j) -= flux;
    }
  return out;
}

MacVelocity advect_momentum(const MacVelocity& a, const MacVelocity& w) {
  const Grid& g = a.grid();
  require_same_grid(w.grid(), g, "advect_momentum");
  const int nx = g.nx(), ny = g.ny();
  const double dx = g.dx(), dy = g.dy();
  MacVelocity out(g);
  // x-momentum control volumes centred on u faces (i, j), 1 <= i < nx
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const double ue = 0.5 * (a.u(i, j) + a.u(i + 1, j));
      const double uw = 0.5 * (a.u(i - 1, j) + a.u(i, j));
      const double vn = j + 1 < ny ? 0.5 * (a.v(i - 1, j + 1) + a.v(i, j + 1)) : 0.0;
      const double vs = j > 0 ? 0.5 * (a.v(i - 1, j) + a.v(i, j)) : 0.0;
      const double c = w.u(i, j);
      const double qe = 0.5 * (c + w.u(i + 1, j)), qw = 0.5 * (w.u(i - 1, j) + c);
      const double qn = j + 1 < ny ? 0.5 * (c + w.u(i, j + 1)) : 0.0;
      const double qs = j > 0 ? 0.5 * (w.u(i, j - 1) + c) : 0.0;
      const double conservative = (ue * qe - uw * qw) / dx + (vn * qn - vs * qs) / dy;
      const double div_cv = (ue - uw) / dx + (vn - vs) / dy;
      out.u(i, j) = conservative - 0.5 * c * div_cv;
    }
  // y-momentum control volumes centred on v faces (i, j), 1 <= j < ny
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double vn = 0.5 * (a.v(i, j) + a.v(i, j + 1));
      const double vs = 0.5 * (a.v(i, j - 1) + a.v(i, j));
      const double ue = i + 1 < nx ? 0.5 * (a.u(i + 1, j - 1) + a.u(i + 1, j)) : 0.0;
      const double uw = i > 0 ? 0.5 * (a.u(i, j - 1) + a.u(i, j)) : 0.0;
      const double c = w.v(i, j);
      const double qn = 0.5 * (c + w.v(i, j + 1)), qs = 0.5 * (w.v(i, j - 1) + c);
      const double qe = i + 1 < nx ? 0.5 * (c + w.v(i + 1, j)) : 0.0;
      const double qw = i > 0 ? 0.5 * (w.v(i - 1, j) + c) : 0.0;
      const double conservative = (ue * qe - uw * qw) / dx + (vn * qn - vs * qs) / dy;
      const double div_cv = (ue - uw) / dx + (vn - vs) / dy;
      out.v(i, j) = conservative - 0.5 * c * div_cv;
    }
  return out;
}

}  // namespace nlchb
