#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "fsi/fem.hpp"
#include "fsi/mesh.hpp"
#include "fsi/params.hpp"

namespace fsi {

// One implicit momentum step on a moving mesh.  Old and new mesh share
// connectivity node for node; the inertial difference quotient integrates the
// previous velocity on the previous geometry with the same coefficients, so no
// interpolation between meshes is needed.
struct AleStepInput {
  const Mesh2D* old_mesh = nullptr;
  const Eigen::VectorXd* old_velocity = nullptr;     // coefficients on old_mesh
  const Mesh2D* new_mesh = nullptr;
  const std::vector<Vec2>* mesh_velocity = nullptr;  // nodal domain velocity on new_mesh
  RigidState rigid;                                  // body state at the new time level
  double tau = 0.0;
  const std::function<Vec2(const Vec2&)>* forcing = nullptr;
  // Test hook: replaces the wall/body boundary values wholesale when set.
  const std::function<Vec2(int, BoundaryTag, const Vec2&)>* dirichlet = nullptr;
};

struct AleStepResult {
  FieldPair field;
  int picard_iterations = 0;
  double divergence = 0.0;  // discrete incompressibility defect of the solution
};

// Solves the step by fixed-point iteration on the advecting velocity, starting
// from the previous velocity.  Throws PicardDiverged when the relative
// increment grows three times in a row or the iteration cap is exhausted.
AleStepResult ale_step(const AleStepInput& in, const FluidParams& fluid);

// Boundary data for the standard step: zero on walls, rigid motion on the body.
Eigen::VectorXd rigid_dirichlet_values(const Mesh2D& mesh, const DofMap& dofs,
                                       const RigidState& rigid);

// 0.5 * rho * integral of |u|^2.
double kinetic_energy(const Mesh2D& mesh, const DofMap& dofs, const Eigen::VectorXd& velocity,
                      double rho);

}  // namespace fsi
