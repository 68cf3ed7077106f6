#include "fsi/navier_stokes.hpp"

#include <cmath>
#include <limits>

#include "fsi/errors.hpp"

namespace fsi {

Eigen::VectorXd rigid_dirichlet_values(const Mesh2D& mesh, const DofMap& dofs,
                                       const RigidState& rigid) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dofs.n_vel_dofs());
  for (int i = 0; i < dofs.n_nodes; ++i) {
    if (!dofs.dirichlet[i] || mesh.node_tag(i) != BoundaryTag::Body) continue;
    const Vec2 u = rigid_velocity(rigid.v, rigid.omega, rigid.q, mesh.node(i));
    g[dofs.vel_dof(i, 0)] = u.x();
    g[dofs.vel_dof(i, 1)] = u.y();
  }
  return g;
}

AleStepResult ale_step(const AleStepInput& in, const FluidParams& fluid) {
  const Mesh2D& mesh = *in.new_mesh;
  const DofMap dofs = DofMap::build(mesh);
  if (in.tau <= 0.0) throw SimError("non-positive time step");
  if (in.old_velocity->size() != dofs.n_vel_dofs())
    throw SimError("previous velocity size does not match the mesh");
  if (static_cast<int>(in.mesh_velocity->size()) != dofs.n_nodes)
    throw SimError("domain velocity size does not match the mesh");
  if (in.old_mesh->num_triangles() != mesh.num_triangles() ||
      in.old_mesh->num_nodes() != mesh.num_nodes())
    throw SimError("meshes of consecutive time levels must share connectivity");

  Eigen::VectorXd dirichlet;
  if (in.dirichlet) {
    dirichlet = Eigen::VectorXd::Zero(dofs.n_vel_dofs());
    for (int i = 0; i < dofs.n_nodes; ++i) {
      if (!dofs.dirichlet[i]) continue;
      const Vec2 g = (*in.dirichlet)(i, mesh.node_tag(i), mesh.node(i));
      dirichlet[dofs.vel_dof(i, 0)] = g.x();
      dirichlet[dofs.vel_dof(i, 1)] = g.y();
    }
  } else {
    dirichlet = rigid_dirichlet_values(mesh, dofs, in.rigid);
  }

  const double rho_tau = fluid.rho / in.tau;
  const StokesBlocks blocks = assemble_stokes_blocks(mesh, dofs, fluid.mu, rho_tau);

  // Momentum carried over from the previous level, integrated on its geometry.
  const StokesBlocks old_blocks = assemble_stokes_blocks(*in.old_mesh, dofs, 0.0, rho_tau);
  const SpMat mass_old = to_sparse(dofs.n_vel_dofs(), dofs.n_vel_dofs(), old_blocks.mass);
  Eigen::VectorXd rhs = mass_old * (*in.old_velocity);
  if (in.forcing) rhs += assemble_forcing(mesh, dofs, *in.forcing);

  std::vector<Vec2> advecting = to_nodal(dofs, *in.old_velocity);
  double prev_increment = std::numeric_limits<double>::infinity();
  int growth_streak = 0;

  AleStepResult out;
  for (int iter = 0;; ++iter) {
    if (iter == fluid.picard_max_iters) {
      PicardDiverged err("fixed-point velocity iteration exhausted " +
                         std::to_string(fluid.picard_max_iters) + " iterations");
      err.iteration = iter;
      throw err;
    }
    std::vector<Triplet> vel_block = blocks.viscous;
    vel_block.insert(vel_block.end(), blocks.mass.begin(), blocks.mass.end());
    const auto convection = assemble_convection(mesh, dofs, advecting, *in.mesh_velocity,
                                                fluid.rho, fluid.antisymmetrize);
    vel_block.insert(vel_block.end(), convection.begin(), convection.end());

    const SparseSystem sys =
        build_saddle_system(dofs, vel_block, blocks.divergence, blocks.mean_row, rhs, dirichlet);
    out.field = solve_saddle_point(sys, dofs, dirichlet);
    out.picard_iterations = iter + 1;

    double diff = 0.0, norm = 0.0;
    for (int i = 0; i < dofs.n_nodes; ++i) {
      const Vec2 u(out.field.velocity[dofs.vel_dof(i, 0)], out.field.velocity[dofs.vel_dof(i, 1)]);
      diff += (u - advecting[i]).squaredNorm();
      norm += u.squaredNorm();
    }
    const double increment = std::sqrt(diff) / std::max(std::sqrt(norm), 1e-30);
    advecting = to_nodal(dofs, out.field.velocity);
    if (increment < fluid.picard_tol) break;
    if (increment > prev_increment) {
      if (++growth_streak >= 3) {
        PicardDiverged err("fixed-point velocity iteration diverging at inner iteration " +
                           std::to_string(iter) + ", increment " + std::to_string(increment));
        err.iteration = iter;
        throw err;
      }
    } else {
      growth_streak = 0;
    }
    prev_increment = increment;
  }

  out.divergence = divergence_residual(mesh, dofs, out.field.velocity);
  return out;
}

double kinetic_energy(const Mesh2D& mesh, const DofMap& dofs, const Eigen::VectorXd& velocity,
                      double rho) {
  const auto rule = triangle_rule();
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = ElementGeom::from(mesh, t);
    const auto nodes = element_nodes(mesh, t);
    for (const auto& qp : rule) {
      double vals[6];
      p2_values(qp.l1, qp.l2, vals);
      Vec2 u = Vec2::Zero();
      for (int a = 0; a < 6; ++a)
        u += vals[a] *
             Vec2(velocity[dofs.vel_dof(nodes[a], 0)], velocity[dofs.vel_dof(nodes[a], 1)]);
      sum += qp.w * geom.det * u.squaredNorm();
    }
  }
  return 0.5 * rho * sum;
}

}  // namespace fsi
