#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nlchb/grid.hpp"
#include "nlchb/spectral.hpp"
#include "test_util.hpp"

using namespace nlchb;
using nlchb::testing::max_abs_diff;
using nlchb::testing::random_field;
using std::numbers::pi;

TEST_CASE("make_grid spacing and validation") {
  const Grid g = Grid::make(64, 64, 1.0, 1.0);
  CHECK(g.dx() == 0.015625);
  CHECK(g.dy() == 0.015625);
  const Grid h = Grid::make(8, 16, 2.0, 1.0);
  CHECK(h.dx() == 0.25);
  CHECK(h.dy() == 0.0625);
  CHECK(h.x_center(0) == doctest::Approx(0.125));
  CHECK(h.y_face(16) == doctest::Approx(1.0));
  CHECK_THROWS_AS(Grid::make(4, 64, 1.0, 1.0), Error);
  CHECK_THROWS_AS(Grid::make(8, 8, 0.0, 1.0), Error);
  CHECK_THROWS_AS(Grid::make(8, 8, 1.0, -2.0), Error);
}

TEST_CASE("cosine transform of a constant has only the zero mode") {
  const Grid g = Grid::make(16, 8, 1.0, 2.0);
  const SpectralField c = dct2_transform(ScalarField(g, 3.0));
  CHECK(c(0, 0) == doctest::Approx(3.0 * 16 * 8).epsilon(1e-14));
  for (int l = 0; l < g.ny(); ++l)
    for (int k = 0; k < g.nx(); ++k)
      if (k || l) CHECK(std::abs(c(k, l)) < 1e-12);
}

TEST_CASE("cosine transform matches direct summation") {
  const Grid g = Grid::make(8, 12, 1.5, 1.0);
  const ScalarField f = random_field(g, 11);
  const SpectralField c = dct2_transform(f);
  for (int l = 0; l < g.ny(); ++l)
    for (int k = 0; k < g.nx(); ++k) {
      double s = 0.0;
      for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
          s += f(i, j) * std::cos(k * pi * (i + 0.5) / g.nx()) * std::cos(l * pi * (j + 0.5) / g.ny());
      CHECK(c(k, l) == doctest::Approx(s).epsilon(1e-12).scale(1.0));
    }

  // cos(pi x / Lx) sampled at centers is exactly mode (1, 0) with weight N/2.
  const ScalarField mode = ScalarField::from_function(g, [&](double x, double) { return std::cos(pi * x / g.lx()); });
  const SpectralField cm = dct2_transform(mode);
  for (int l = 0; l < g.ny(); ++l)
    for (int k = 0; k < g.nx(); ++k) {
      const double expect = (k == 1 && l == 0) ? 0.5 * g.size() : 0.0;
      CHECK(std::abs(cm(k, l) - expect) < 1e-12);
    }
}

TEST_CASE("cosine transform round trip") {
  for (int n : {8, 16, 64}) {
    const Grid g = Grid::make(n, n, 1.0, 1.0);
    const ScalarField f = random_field(g, 100 + n);
    CHECK(max_abs_diff(dct2_inverse(dct2_transform(f)), f) <= 1e-12);
  }
}

TEST_CASE("Neumann Laplacian") {
  const Grid g = Grid::make(32, 16, 1.0, 0.5);
  CHECK(nlchb::testing::max_abs_value(laplacian_neumann(ScalarField(g, 2.5))) < 1e-12);

  const ScalarField f = ScalarField::from_function(g, [&](double x, double) { return std::cos(pi * x / g.lx()); });
  const ScalarField lap = laplacian_neumann(f);
  const double lam = neumann_eigenvalue(g, 1, 0);
  CHECK(lam == doctest::Approx(2.0 / (g.dx() * g.dx()) * (1.0 - std::cos(pi / g.nx()))));
  CHECK(max_abs_diff(lap, -lam * f) < 1e-11);
  // the discrete eigenvalue approaches the continuous symbol
  CHECK(lam == doctest::Approx(pi * pi).epsilon(2e-3));

  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ScalarField r = random_field(g, seed);
    const ScalarField lr = laplacian_neumann(r);
    CHECK(std::abs(mean(lr)) < 1e-12 * nlchb::testing::max_abs_value(lr));
    CHECK(max_abs_diff(lr, laplacian_stencil(r)) < 1e-10 * nlchb::testing::max_abs_value(lr));
  }
}

TEST_CASE("helmholtz_solve") {
  const Grid g = Grid::make(16, 24, 1.0, 1.5);
  const ScalarField rhs = random_field(g, 7);
  CHECK(max_abs_diff(helmholtz_solve(4.0, 0.0, rhs), 0.25 * rhs) < 1e-14);

  const double alpha = 3.0, beta = 0.7;
  const ScalarField mode = ScalarField::from_function(g, [&](double x, double) { return std::cos(pi * x / g.lx()); });
  const ScalarField eig_rhs = (alpha + beta * neumann_eigenvalue(g, 1, 0)) * mode;
  CHECK(max_abs_diff(helmholtz_solve(alpha, beta, eig_rhs), mode) < 1e-12);

  const ScalarField w = helmholtz_solve(alpha, beta, rhs);
  const ScalarField applied = alpha * w - beta * laplacian_stencil(w);
  CHECK(max_abs_diff(applied, rhs) <= 1e-10 * nlchb::testing::max_abs_value(rhs));

  CHECK_THROWS_AS(helmholtz_solve(0.0, 1.0, rhs), Error);
  CHECK_THROWS_AS(helmholtz_solve(1.0, -1.0, rhs), Error);
}

TEST_CASE("velocity helmholtz inverts the no-slip Laplacian") {
  const Grid g = Grid::make(12, 10, 1.2, 1.0);
  const MacVelocity rhs = nlchb::testing::random_velocity(g, 5);
  const double alpha = 50.0, beta = 0.3;
  const MacVelocity w = helmholtz_solve_velocity(alpha, beta, rhs);
  CHECK(w.boundary_is_zero());
  MacVelocity applied = w;
  applied *= alpha;
  applied.axpy(-beta, laplacian_velocity(w));
  CHECK(max_abs_diff(applied, rhs) < 1e-11);
}

TEST_CASE("gradient_cc") {
  const Grid g = Grid::make(16, 16, 1.0, 1.0);
  const auto [cx, cy] = gradient_cc(ScalarField(g, 4.0));
  CHECK(nlchb::testing::max_abs_value(cx) == 0.0);
  CHECK(nlchb::testing::max_abs_value(cy) == 0.0);

  const auto [lx, ly] = gradient_cc(ScalarField::from_function(g, [](double x, double y) { return 2.0 * x + 0.0 * y; }));
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 1; i < g.nx() - 1; ++i) {
      CHECK(lx(i, j) == doctest::Approx(2.0).epsilon(1e-12));
      CHECK(std::abs(ly(i, j)) < 1e-12);
    }

  auto error_at = [](int n) {
    const Grid gg = Grid::make(n, n, 1.0, 1.0);
    const auto [gx, gy] = gradient_cc(ScalarField::from_function(gg, [](double x, double) { return std::cos(pi * x); }));
    double e = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) e = std::max(e, std::abs(gx(i, j) + pi * std::sin(pi * gg.x_center(i))));
    return e;
  };
  const double e1 = error_at(32), e2 = error_at(64), e3 = error_at(128);
  CHECK(std::log2(e1 / e2) >= 1.9);
  CHECK(std::log2(e2 / e3) >= 1.9);
}

TEST_CASE("field reductions") {
  const Grid g = Grid::make(16, 16, 1.0, 1.0);
  const Reductions c = field_reductions(ScalarField(g, -2.0));
  CHECK(c.integral == doctest::Approx(-2.0));
  CHECK(c.mean == doctest::Approx(-2.0));
  CHECK(c.l2_norm == doctest::Approx(2.0));
  CHECK(c.h1_seminorm == 0.0);

  double prev_l2 = 1.0, prev_h1 = 1.0;
  for (int n : {32, 64, 128}) {
    const Grid gg = Grid::make(n, n, 1.0, 1.0);
    const Reductions r = field_reductions(ScalarField::from_function(gg, [](double x, double) { return std::cos(pi * x); }));
    const double e_l2 = std::abs(r.l2_norm * r.l2_norm - 0.5);
    CHECK(e_l2 < 1e-12);  // midpoint rule is exact for this trigonometric polynomial
    const Reductions s = field_reductions(
        ScalarField::from_function(gg, [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); }));
    const double e_h1 = std::abs(0.5 * s.h1_seminorm * s.h1_seminorm - pi * pi / 4.0);
    CHECK(e_h1 < prev_h1);
    prev_h1 = e_h1;
    prev_l2 = e_l2;
  }
  CHECK(prev_h1 < 2e-3);
  (void)prev_l2;
}

TEST_CASE("compact Dirichlet form pairs with the stencil Laplacian") {
  const Grid g = Grid::make(10, 14, 1.0, 1.3);
  const ScalarField f = random_field(g, 42);
  CHECK(compact_dirichlet(f) == doctest::Approx(-inner(laplacian_stencil(f), f)).epsilon(1e-12));
}
