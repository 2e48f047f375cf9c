#pragma once

#include "nlchb/grid.hpp"

namespace nlchb {

// Normalization of the cosine transform:
//
//   forward  c(k,l) = sum_{i,j} f(i,j) cos(k pi (i+1/2)/nx) cos(l pi (j+1/2)/ny)
//   inverse  f(i,j) = 1/(nx ny) sum_{k,l} w_k w_l c(k,l) cos(..) cos(..),  w_0 = 1, w_k = 2
//
// so c(0,0) = nx * ny * mean(f). The basis functions are the eigenvectors of the
// 5-point Laplacian with even-reflection (homogeneous Neumann) ghost cells.

SpectralField dct2_transform(const ScalarField& field);
ScalarField dct2_inverse(const SpectralField& coeffs);

/// Eigenvalue of -Lap_N for mode (k, l):
/// (2/dx^2)(1 - cos(k pi/nx)) + (2/dy^2)(1 - cos(l pi/ny)).
double neumann_eigenvalue(const Grid& grid, int k, int l);

/// Largest eigenvalue of -Lap_N on the grid (mode (nx-1, ny-1)).
double neumann_spectral_radius(const Grid& grid);

/// Spectral application of the discrete Neumann Laplacian. Agrees with the
/// 5-point stencil with reflected ghosts up to rounding.
ScalarField laplacian_neumann(const ScalarField& field);

/// 5-point Neumann Laplacian evaluated directly by the stencil.
ScalarField laplacian_stencil(const ScalarField& field);

/// Solves (alpha I - beta Lap_N) w = rhs by diagonal division in the cosine basis.
ScalarField helmholtz_solve(double alpha, double beta, const ScalarField& rhs);

/// Zero-mean solution of Lap_N psi = rhs - mean(rhs).
ScalarField poisson_neumann(const ScalarField& rhs);

/// Solves (I diag(symbol)) w = rhs where symbol(k, l) is given per cosine mode.
/// Every entry of the symbol must be nonzero.
ScalarField spectral_solve(const SpectralField& symbol, const ScalarField& rhs);

/// Multiplies each cosine mode by symbol(k, l).
ScalarField spectral_apply(const SpectralField& symbol, const ScalarField& field);

// Velocity components on the MAC grid with no-slip walls. The u component uses
// faces i = 1..nx-1 (Dirichlet in x) and odd reflection across the walls in y;
// v is the transpose. The corresponding 5-point operators are diagonal in
// (DST-I x DST-II) and (DST-II x DST-I) respectively.

/// Solves (alpha I - beta Lap_D) w = rhs independently for each velocity
/// component; wall-normal faces of the result are zero.
MacVelocity helmholtz_solve_velocity(double alpha, double beta, const MacVelocity& rhs);

/// Component-wise 5-point Laplacian with no-slip ghost treatment.
MacVelocity laplacian_velocity(const MacVelocity& vel);

}  // namespace nlchb
