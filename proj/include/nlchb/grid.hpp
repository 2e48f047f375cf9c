#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlchb {

/// Thrown for violated preconditions anywhere in the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Cell-centered discretization of the box [0, Lx] x [0, Ly].
///
/// Cell (i, j) has its center at ((i + 1/2) dx, (j + 1/2) dy). Vertical faces
/// sit at x = i dx (i = 0..nx) and horizontal faces at y = j dy (j = 0..ny).
class Grid {
public:
  static constexpr int kMinCells = 8;

  static Grid make(int nx, int ny, double lx, double ly);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double dx() const { return lx_ / nx_; }
  double dy() const { return ly_ / ny_; }
  double cell_area() const { return dx() * dy(); }
  double area() const { return lx_ * ly_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }

  double x_center(int i) const { return (i + 0.5) * dx(); }
  double y_center(int j) const { return (j + 0.5) * dy(); }
  double x_face(int i) const { return i * dx(); }
  double y_face(int j) const { return j * dy(); }

  bool operator==(const Grid&) const = default;

private:
  Grid(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {}

  int nx_;
  int ny_;
  double lx_;
  double ly_;
};

void require_same_grid(const Grid& a, const Grid& b, const char* what);

/// Values at cell centers, stored x-fastest: index(i, j) = j * nx + i.
class ScalarField {
public:
  explicit ScalarField(const Grid& grid, double value = 0.0)
      : grid_(grid), values_(grid.size(), value) {}

  template <class F>
  static ScalarField from_function(const Grid& grid, F&& f) {
    ScalarField out(grid);
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) out(i, j) = f(grid.x_center(i), grid.y_center(j));
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int i, int j) { return values_[static_cast<std::size_t>(j) * grid_.nx() + i]; }
  double operator()(int i, int j) const {
    return values_[static_cast<std::size_t>(j) * grid_.nx() + i];
  }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);
  /// this += s * other
  ScalarField& axpy(double s, const ScalarField& other);

  bool operator==(const ScalarField&) const = default;

private:
  Grid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Coefficients in the cell-centered cosine basis cos(k pi (i+1/2)/nx) cos(l pi (j+1/2)/ny).
/// Same x-fastest layout as ScalarField: coefficient (k, l) at l * nx + k.
class SpectralField {
public:
  explicit SpectralField(const Grid& grid) : grid_(grid), coeffs_(grid.size(), 0.0) {}

  const Grid& grid() const { return grid_; }
  double& operator()(int k, int l) { return coeffs_[static_cast<std::size_t>(l) * grid_.nx() + k]; }
  double operator()(int k, int l) const {
    return coeffs_[static_cast<std::size_t>(l) * grid_.nx() + k];
  }
  std::span<double> coeffs() { return coeffs_; }
  std::span<const double> coeffs() const { return coeffs_; }

private:
  Grid grid_;
  std::vector<double> coeffs_;
};

/// Staggered (MAC) velocity. u lives on vertical faces ((nx+1) x ny, x-fastest),
/// v on horizontal faces (nx x (ny+1)). Wall-normal faces are kept at zero.
class MacVelocity {
public:
  explicit MacVelocity(const Grid& grid)
      : grid_(grid),
        u_(static_cast<std::size_t>(grid.nx() + 1) * grid.ny(), 0.0),
        v_(static_cast<std::size_t>(grid.nx()) * (grid.ny() + 1), 0.0) {}

  const Grid& grid() const { return grid_; }

  double& u(int i, int j) { return u_[static_cast<std::size_t>(j) * (grid_.nx() + 1) + i]; }
  double u(int i, int j) const { return u_[static_cast<std::size_t>(j) * (grid_.nx() + 1) + i]; }
  double& v(int i, int j) { return v_[static_cast<std::size_t>(j) * grid_.nx() + i]; }
  double v(int i, int j) const { return v_[static_cast<std::size_t>(j) * grid_.nx() + i]; }

  std::span<double> u_values() { return u_; }
  std::span<const double> u_values() const { return u_; }
  std::span<double> v_values() { return v_; }
  std::span<const double> v_values() const { return v_; }

  /// Zeroes every wall-normal face.
  void apply_no_penetration();
  bool boundary_is_zero() const;
  bool all_finite() const;
  double max_abs() const;

  MacVelocity& operator+=(const MacVelocity& other);
  MacVelocity& operator*=(double s);
  MacVelocity& axpy(double s, const MacVelocity& other);

  bool operator==(const MacVelocity&) const = default;

private:
  Grid grid_;
  std::vector<double> u_;
  std::vector<double> v_;
};

/// Cell-centered face-averaged divergence (u_{i+1}-u_i)/dx + (v_{j+1}-v_j)/dy.
ScalarField divergence(const MacVelocity& vel);

/// Face gradient of a cell field; wall faces get 0 (homogeneous Neumann).
MacVelocity face_gradient(const ScalarField& field);

struct Reductions {
  double integral;
  double mean;
  double l2_norm;
  double h1_seminorm;
};

/// Centered-difference gradient at cell centers with even-reflection ghosts.
std::pair<ScalarField, ScalarField> gradient_cc(const ScalarField& field);

Reductions field_reductions(const ScalarField& field);

/// Midpoint-rule integral; summation order is fixed (row by row).
double integral(const ScalarField& field);
double mean(const ScalarField& field);
/// (a, b)_Omega by the midpoint rule.
double inner(const ScalarField& a, const ScalarField& b);
/// (u, w) over faces, each face weighted by dx*dy.
double inner(const MacVelocity& a, const MacVelocity& b);
double max_abs(const ScalarField& field);

/// Discrete Dirichlet form sum over faces |G f|^2 dx dy, the energy paired with
/// the 5-point Neumann Laplacian: compact_dirichlet(f) = -(Lap_N f, f).
double compact_dirichlet(const ScalarField& field);

}  // namespace nlchb
