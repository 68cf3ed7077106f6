#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fsi/extension.hpp"
#include "fsi/fem.hpp"
#include "fsi/mesh.hpp"
#include "fsi/params.hpp"

namespace fsi {

// Net force and torque on the disk from the Cauchy stress
// -p I + mu (grad u + grad u^T), integrated over the body boundary edges with
// the normal pointing out of the fluid.  Stress values are taken from the
// element adjacent to each boundary edge.
Load hydrodynamic_load_boundary(const Mesh2D& mesh, const DofMap& dofs, const FieldPair& field,
                                double mu, const Vec2& q);

// Volumetric alternative: trades the boundary integral for domain integrals
// against a cutoff field (1 on the body, 0 on the walls).  The force estimate
// substitutes the momentum balance, so it needs both time levels; the torque
// estimate uses the elementwise stress divergence directly.
struct BulkLoadInput {
  const Mesh2D* new_mesh = nullptr;
  const Mesh2D* old_mesh = nullptr;
  const Eigen::VectorXd* new_velocity = nullptr;
  const Eigen::VectorXd* old_velocity = nullptr;     // coefficients on old_mesh
  const Eigen::VectorXd* pressure = nullptr;         // new level
  const CutoffField* cutoff_new = nullptr;
  const CutoffField* cutoff_old = nullptr;
  const std::vector<Vec2>* mesh_velocity = nullptr;  // nodal, new mesh
  double tau = 0.0;
  Vec2 q{0.0, 0.0};  // body center at the new level
};
Load hydrodynamic_load_bulk(const BulkLoadInput& in, const FluidParams& fluid);

// Semi-implicit update: velocity first from gravity plus the load, position
// with the already-updated velocity.  Throws NonFiniteLoad on NaN or inf.
RigidState advance_rigid(const RigidState& prev, const Load& load, const RigidParams& body,
                         double tau);

// Integrates one load per step starting from the initial state; the result has
// loads.size() + 1 states.
RigidTrajectory integrate_trajectory(const RigidState& initial, const std::vector<Load>& loads,
                                     const RigidParams& body, double tau);

}  // namespace fsi
