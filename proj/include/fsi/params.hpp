#pragma once

#include <numbers>
#include <vector>

#include "fsi/geometry.hpp"

namespace fsi {

struct FluidParams {
  double rho = 1.0;
  double mu = 1.0;
  double picard_tol = 1e-10;
  int picard_max_iters = 60;
  bool antisymmetrize = true;
};

struct RigidParams {
  double rho_body = 200.0 / std::numbers::pi;
  double radius = 0.1;
  Vec2 gravity{0.0, -9.8};

  double mass() const { return rho_body * std::numbers::pi * radius * radius; }
  double inertia() const { return 0.5 * mass() * radius * radius; }
};

// Disk mass and polar moment from the closed forms.
inline std::pair<double, double> inertia_scalar(const RigidParams& p) {
  return {p.mass(), p.inertia()};
}

struct RigidState {
  Vec2 q{0.0, 0.0};
  Vec2 v{0.0, 0.0};
  double omega = 0.0;
};

struct RigidTrajectory {
  double tau = 0.0;
  std::vector<RigidState> states;  // n_steps + 1 entries, states[0] is the initial state

  int n_steps() const { return static_cast<int>(states.size()) - 1; }
};

struct Load {
  Vec2 force{0.0, 0.0};
  double torque = 0.0;
};

}  // namespace fsi
