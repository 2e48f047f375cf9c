#pragma once

#include "nlchb/grid.hpp"

namespace nlchb {

// Operators on the staggered grid shared by the solver and the energy ledger.
// Nodes are the cell corners (i dx, j dy), i = 0..nx, j = 0..ny; a node on a
// wall carries quadrature weight 1/2 (1/4 at corners), which makes the strain
// norm below the exact adjoint pairing of stress_divergence.

/// Node-centred scalar, (nx+1) x (ny+1), x-fastest.
struct NodeField {
  explicit NodeField(const Grid& g) : nx(g.nx() + 1), values(static_cast<std::size_t>(g.nx() + 1) * (g.ny() + 1)) {}
  double& operator()(int i, int j) { return values[static_cast<std::size_t>(j) * nx + i]; }
  double operator()(int i, int j) const { return values[static_cast<std::size_t>(j) * nx + i]; }
  int nx;
  std::vector<double> values;
};

/// Average of the adjacent cell values at each node (1, 2 or 4 cells).
NodeField cell_to_node(const ScalarField& f);

/// Face average of a cell field; wall faces take the adjacent cell value.
MacVelocity cell_to_face(const ScalarField& f);

/// Face velocity averaged to cell centres, per component.
std::pair<ScalarField, ScalarField> face_to_cell(const MacVelocity& u);

/// sum_cells nu_c (Du_xx^2 + Du_yy^2) + sum_nodes w nu_n 2 Du_xy^2, times dx dy.
/// No-slip ghosts: the wall-tangential derivative at a wall node is 2 u / h.
double strain_norm_sq(const MacVelocity& u, const ScalarField& nu_cell, const NodeField& nu_node);

/// div(2 nu D u) on interior faces, the negative adjoint of the strain form:
/// (stress_divergence(u), w) = -2 sum nu Du : Dw.
MacVelocity stress_divergence(const MacVelocity& u, const ScalarField& nu_cell, const NodeField& nu_node);

/// Conservative central flux form div(u f) at cell centres; conserves sum f exactly.
ScalarField advect_scalar(const MacVelocity& u, const ScalarField& f);

/// Skew-symmetric momentum advection: (adv(u, w), w) = 0 for every u, w.
MacVelocity advect_momentum(const MacVelocity& u, const MacVelocity& w);

}  // namespace nlchb
