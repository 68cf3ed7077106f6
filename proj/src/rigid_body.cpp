#include "fsi/rigid_body.hpp"

#include <cmath>

#include "fsi/errors.hpp"

namespace fsi {

namespace {

// Physical gradient matrix of the quadratic shapes at barycentric (l1, l2).
void physical_gradients(const ElementGeom& geom, double l1, double l2, Vec2 out[6]) {
  double ref[6][2];
  p2_ref_gradients(l1, l2, ref);
  for (int a = 0; a < 6; ++a) out[a] = geom.jinv_t * Vec2(ref[a][0], ref[a][1]);
}

Mat2 velocity_gradient(const Eigen::VectorXd& u, const DofMap& dofs,
                       const std::array<int, 6>& nodes, const Vec2 grads[6]) {
  Mat2 g = Mat2::Zero();
  for (int a = 0; a < 6; ++a) {
    const Vec2 ua(u[dofs.vel_dof(nodes[a], 0)], u[dofs.vel_dof(nodes[a], 1)]);
    g += ua * grads[a].transpose();  // g(i, j) = d u_i / d x_j
  }
  return g;
}

}  // namespace

Load hydrodynamic_load_boundary(const Mesh2D& mesh, const DofMap& dofs, const FieldPair& field,
                                double mu, const Vec2& q) {
  const auto& rule = edge_rule();
  Load load;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int k = 0; k < 3; ++k) {
      const int e = mesh.tri_edges[t][k];
      if (mesh.edge_tag[e] != BoundaryTag::Body) continue;
      const auto& tri = mesh.triangles[t];
      // Directed walk with the fluid on the left; its right side faces the body.
      const Vec2 a = mesh.vertices[tri[(k + 1) % 3]];
      const Vec2 b = mesh.vertices[tri[(k + 2) % 3]];
      const Vec2 d = b - a;
      const double len = d.norm();
      const Vec2 nu(d.y() / len, -d.x() / len);

      const auto geom = ElementGeom::from(mesh, t);
      const auto nodes = element_nodes(mesh, t);
      const Mat2 jinv = geom.jinv_t.transpose();
      for (const auto& qp : rule) {
        const Vec2 x = a + qp.t * d;
        const Vec2 local = jinv * (x - geom.x0);
        Vec2 grads[6];
        physical_gradients(geom, local.x(), local.y(), grads);
        const Mat2 gu = velocity_gradient(field.velocity, dofs, nodes, grads);
        const double p = (1.0 - local.x() - local.y()) * field.pressure[tri[0]] +
                         local.x() * field.pressure[tri[1]] + local.y() * field.pressure[tri[2]];
        const Mat2 stress = -p * Mat2::Identity() + mu * (gu + gu.transpose());
        const Vec2 traction = stress * nu;
        load.force -= qp.w * len * traction;
        load.torque -= qp.w * len * cross2(x - q, traction);
      }
    }
  }
  return load;
}

Load hydrodynamic_load_bulk(const BulkLoadInput& in, const FluidParams& fluid) {
  const Mesh2D& mesh = *in.new_mesh;
  const DofMap dofs = DofMap::build(mesh);
  const auto& rule = triangle_rule();
  const double mu = fluid.mu;

  Vec2 stress_part = Vec2::Zero();
  Vec2 mass_new = Vec2::Zero();
  Vec2 transport = Vec2::Zero();
  double torque_est = 0.0;

  double hess_ref[6][3];
  p2_ref_hessians(hess_ref);

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = ElementGeom::from(mesh, t);
    const auto nodes = element_nodes(mesh, t);
    const auto& tri = mesh.triangles[t];

    // Constant linear-pressure gradient on the element.
    const Vec2 grad_l1 = geom.jinv_t.col(0);
    const Vec2 grad_l2 = geom.jinv_t.col(1);
    const Vec2 grad_p = (*in.pressure)[tri[0]] * (-grad_l1 - grad_l2) +
                        (*in.pressure)[tri[1]] * grad_l1 + (*in.pressure)[tri[2]] * grad_l2;

    // Constant second derivatives of the quadratic velocity.
    Vec2 laplace_u = Vec2::Zero();       // (lap u_1, lap u_2)
    Vec2 grad_div_u = Vec2::Zero();      // gradient of div u
    for (int a = 0; a < 6; ++a) {
      const Mat2 href = (Mat2() << hess_ref[a][0], hess_ref[a][1], hess_ref[a][1],
                         hess_ref[a][2])
                            .finished();
      const Mat2 h = geom.jinv_t * href * geom.jinv_t.transpose();
      const Vec2 ua((*in.new_velocity)[dofs.vel_dof(nodes[a], 0)],
                    (*in.new_velocity)[dofs.vel_dof(nodes[a], 1)]);
      laplace_u += (h(0, 0) + h(1, 1)) * ua;
      grad_div_u += h.col(0) * ua.x() + h.col(1) * ua.y();
    }
    const Vec2 div_stress = -grad_p + mu * (laplace_u + grad_div_u);

    for (const auto& qp : rule) {
      double vals[6];
      p2_values(qp.l1, qp.l2, vals);
      Vec2 grads[6];
      physical_gradients(geom, qp.l1, qp.l2, grads);

      Vec2 u = Vec2::Zero(), vmesh = Vec2::Zero(), grad_z = Vec2::Zero();
      double z = 0.0, dz_nodal = 0.0;
      for (int a = 0; a < 6; ++a) {
        const int n = nodes[a];
        u += vals[a] *
             Vec2((*in.new_velocity)[dofs.vel_dof(n, 0)], (*in.new_velocity)[dofs.vel_dof(n, 1)]);
        vmesh += vals[a] * (*in.mesh_velocity)[n];
        z += vals[a] * (*in.cutoff_new)[n];
        grad_z += (*in.cutoff_new)[n] * grads[a];
        dz_nodal += vals[a] * ((*in.cutoff_new)[n] - (*in.cutoff_old)[n]);
      }
      const Mat2 gu = velocity_gradient(*in.new_velocity, dofs, nodes, grads);
      const double p = (1.0 - qp.l1 - qp.l2) * (*in.pressure)[tri[0]] +
                       qp.l1 * (*in.pressure)[tri[1]] + qp.l2 * (*in.pressure)[tri[2]];
      const Mat2 stress = -p * Mat2::Identity() + mu * (gu + gu.transpose());

      const double wdet = qp.w * geom.det;
      stress_part += wdet * (stress * grad_z);
      mass_new += wdet * z * u;
      // Spatial rate of the cutoff at a fixed point: nodal rate minus drift.
      const double dz_dt = dz_nodal / in.tau - vmesh.dot(grad_z);
      transport -= wdet * (dz_dt + u.dot(grad_z)) * u;

      const Vec2 y = geom.map(qp.l1, qp.l2) - in.q;
      const Vec2 a_field(y.x() * stress(1, 0) - y.y() * stress(0, 0),
                         y.x() * stress(1, 1) - y.y() * stress(0, 1));
      torque_est += wdet * (a_field.dot(grad_z) + z * cross2(y, div_stress));
    }
  }

  // Previous momentum integrated on the previous geometry.
  Vec2 mass_old = Vec2::Zero();
  const Mesh2D& old_mesh = *in.old_mesh;
  for (int t = 0; t < old_mesh.num_triangles(); ++t) {
    const auto geom = ElementGeom::from(old_mesh, t);
    const auto nodes = element_nodes(old_mesh, t);
    for (const auto& qp : rule) {
      double vals[6];
      p2_values(qp.l1, qp.l2, vals);
      Vec2 u = Vec2::Zero();
      double z = 0.0;
      for (int a = 0; a < 6; ++a) {
        const int n = nodes[a];
        u += vals[a] *
             Vec2((*in.old_velocity)[dofs.vel_dof(n, 0)], (*in.old_velocity)[dofs.vel_dof(n, 1)]);
        z += vals[a] * (*in.cutoff_old)[n];
      }
      mass_old += qp.w * geom.det * z * u;
    }
  }

  Load load;
  load.force = -(stress_part + fluid.rho * ((mass_new - mass_old) / in.tau + transport));
  load.torque = -torque_est;
  return load;
}

RigidState advance_rigid(const RigidState& prev, const Load& load, const RigidParams& body,
                         double tau) {
  if (!std::isfinite(load.force.x()) || !std::isfinite(load.force.y()) ||
      !std::isfinite(load.torque))
    throw NonFiniteLoad("hydrodynamic load is not finite");
  const auto [m, inertia] = inertia_scalar(body);
  RigidState next;
  next.v = prev.v + tau * (body.gravity + load.force / m);
  next.q = prev.q + tau * next.v;
  next.omega = prev.omega + tau * load.torque / inertia;
  return next;
}

RigidTrajectory integrate_trajectory(const RigidState& initial, const std::vector<Load>& loads,
                                     const RigidParams& body, double tau) {
  RigidTrajectory traj;
  traj.tau = tau;
  traj.states.reserve(loads.size() + 1);
  traj.states.push_back(initial);
  for (const Load& load : loads)
    traj.states.push_back(advance_rigid(traj.states.back(), load, body, tau));
  return traj;
}

}  // namespace fsi
