#pragma once

#include <cstdint>
#include <string>

#include "nlchb/grid.hpp"

namespace nlchb {

enum class Mode { kNonlocal, kLocal };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& name);

/// The solution triple [phi, u, theta] at time t, plus the chemical potential
/// used by the step that produced it.
struct SimState {
  explicit SimState(const Grid& g) : phi(g), theta(g), u(g), mu(g) {}

  double t = 0.0;
  std::int64_t step = 0;
  ScalarField phi;
  ScalarField theta;
  MacVelocity u;
  ScalarField mu;

  const Grid& grid() const { return phi.grid(); }
  bool all_finite() const { return phi.all_finite() && theta.all_finite() && u.all_finite() && mu.all_finite(); }
  bool operator==(const SimState&) const = default;
};

/// Time-independent body forces: q drives momentum, z heats.
struct Forcing {
  explicit Forcing(const Grid& g) : q(g), z(g) {}
  MacVelocity q;
  ScalarField z;
};

}  // namespace nlchb
