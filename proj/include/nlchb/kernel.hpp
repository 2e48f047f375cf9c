#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "nlchb/grid.hpp"

namespace nlchb {

/// Integral of |sigma . e1|^2 over the unit sphere S^{d-1}, d in {2, 3}.
double compute_cd(int d);

enum class MollifierShape {
  kBump,     ///< exp(-1/(1-s^2)) on [0,1)
  kQuartic,  ///< (1-s^2)^2 on [0,1], C^1 at s = 1
};

std::string to_string(MollifierShape shape);
MollifierShape parse_mollifier_shape(const std::string& name);

/// Radial profile eta with compact support in [0, 1], scaled so that
/// int_0^inf eta(s) s^{d+1-gamma} ds = 2 / C_d.
struct Mollifier {
  double gamma = 0.5;
  int dim = 2;
  MollifierShape shape = MollifierShape::kBump;
  double c_eta = 1.0;

  double operator()(double s) const;
  double derivative(double s) const;
  /// Unscaled profile (c_eta = 1).
  double base(double s) const;
};

Mollifier calibrate_mollifier(double gamma, int d, MollifierShape shape = MollifierShape::kBump);

/// int_0^inf eta(s) s^{d+1-gamma} ds evaluated with an independent quadrature rule.
double renormalization_integral(const Mollifier& m);

/// Continuous kernel J_eps(r) = eps^{gamma-2-d} eta(r/eps) r^{-gamma}.
double kernel_radial(const Mollifier& m, double epsilon, double r);

/// ||J_eps||_{L^1(R^2)} by adaptive radial quadrature (reference value).
double kernel_l1_exact(const Mollifier& m, double epsilon);

/// Sampled J_eps on the displacement lattice (m dx, n dy), |m| < nx, |n| < ny,
/// together with the zero-padded (2nx x 2ny) spectrum used by convolve().
/// Immutable after construction; copies share the spectrum.
class KernelGrid {
public:
  KernelGrid(const Grid& grid, const Mollifier& mollifier, double epsilon);

  /// Builds from explicit lattice values (test hook); values must have
  /// (2nx-1) x (2ny-1) entries, displacement (m, n) at (n+ny-1)(2nx-1) + (m+nx-1).
  static KernelGrid from_lattice(const Grid& grid, std::vector<double> values, double epsilon = 0.0,
                                 double gamma = 0.0);

  const Grid& grid() const { return grid_; }
  double epsilon() const { return epsilon_; }
  double gamma() const { return mollifier_.gamma; }
  const Mollifier& mollifier() const { return mollifier_; }
  bool resolved() const { return resolved_; }
  /// Human-readable warnings raised during construction.
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// J at lattice displacement (m dx, n dy).
  double at(int m, int n) const;
  int lattice_nx() const { return 2 * grid_.nx() - 1; }
  int lattice_ny() const { return 2 * grid_.ny() - 1; }
  const std::vector<double>& lattice() const { return values_; }

  /// r2c spectrum of the padded kernel, pre-multiplied by dx*dy and the c2r scaling.
  const std::vector<std::complex<double>>& spectrum() const { return *spectrum_; }

  /// Symbol of the reflected-extension operator phi -> a_inf phi - J * phi_even
  /// per cosine mode (k, l): sum_{m,n} J(m,n) (1 - cos(k pi m/nx) cos(l pi n/ny)) dx dy.
  /// This is the cosine-diagonal operator that coincides with a phi - J * phi
  /// away from the boundary.
  std::vector<double> reflected_symbol() const;

private:
  KernelGrid(const Grid& grid, std::vector<double> values, double epsilon, const Mollifier& m);
  void build_spectrum();

  Grid grid_;
  Mollifier mollifier_;
  double epsilon_;
  bool resolved_ = true;
  std::vector<std::string> warnings_;
  std::vector<double> values_;
  std::shared_ptr<const std::vector<std::complex<double>>> spectrum_;
};

KernelGrid sample_kernel(const Mollifier& mollifier, double epsilon, const Grid& grid);

/// Midpoint-rule (J * phi)(x) = int_Omega J(x - y) phi(y) dy by zero-padded FFT.
ScalarField convolve(const KernelGrid& kernel, const ScalarField& field);

/// Same quantity by the O(N^2) double sum; nx*ny <= 4096.
ScalarField convolve_direct(const KernelGrid& kernel, const ScalarField& field);

/// a(x) = int_Omega J(x - y) dy.
class CoefficientA {
public:
  explicit CoefficientA(ScalarField values) : values_(std::move(values)) {}
  const ScalarField& values() const { return values_; }
  const Grid& grid() const { return values_.grid(); }
  double max() const;
  double min() const;

private:
  ScalarField values_;
};

CoefficientA compute_a(const KernelGrid& kernel);

struct KernelNorms {
  double l1;
  double grad_l1;
};

KernelNorms kernel_norms(const KernelGrid& kernel);

}  // namespace nlchb
