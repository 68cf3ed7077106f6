#include "fsi/fem.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fsi/errors.hpp"

namespace fsi {

DofMap DofMap::build(const Mesh2D& mesh) {
  DofMap dofs;
  dofs.n_nodes = mesh.num_nodes();
  dofs.n_pressure = mesh.num_vertices();
  dofs.dirichlet.resize(dofs.n_nodes);
  for (int i = 0; i < dofs.n_nodes; ++i)
    dofs.dirichlet[i] = mesh.node_tag(i) != BoundaryTag::Interior;
  dofs.free_index.assign(2 * dofs.n_nodes, -1);
  int next = 0;
  for (int i = 0; i < dofs.n_nodes; ++i) {
    if (dofs.dirichlet[i]) continue;
    dofs.free_index[2 * i] = next++;
    dofs.free_index[2 * i + 1] = next++;
  }
  dofs.n_free = next;
  return dofs;
}

const std::vector<QuadPoint>& triangle_rule() {
  static const std::vector<QuadPoint> rule = [] {
    const double s15 = std::sqrt(15.0);
    const double b1 = (6.0 + s15) / 21.0, a1 = 1.0 - 2.0 * b1;
    const double b2 = (6.0 - s15) / 21.0, a2 = 1.0 - 2.0 * b2;
    const double w0 = 9.0 / 80.0;  // scaled by reference area 1/2
    const double w1 = (155.0 + s15) / 2400.0;
    const double w2 = (155.0 - s15) / 2400.0;
    std::vector<QuadPoint> q;
    q.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, w0});
    q.push_back({a1, b1, b1, w1});
    q.push_back({b1, a1, b1, w1});
    q.push_back({b1, b1, a1, w1});
    q.push_back({a2, b2, b2, w2});
    q.push_back({b2, a2, b2, w2});
    q.push_back({b2, b2, a2, w2});
    return q;
  }();
  return rule;
}

const std::vector<EdgeQuadPoint>& edge_rule() {
  static const std::vector<EdgeQuadPoint> rule = [] {
    const double off = 0.5 * std::sqrt(3.0 / 5.0);
    return std::vector<EdgeQuadPoint>{
        {0.5 - off, 5.0 / 18.0}, {0.5, 8.0 / 18.0}, {0.5 + off, 5.0 / 18.0}};
  }();
  return rule;
}

void p2_values(double l1, double l2, double out[6]) {
  const double l0 = 1.0 - l1 - l2;
  out[0] = l0 * (2.0 * l0 - 1.0);
  out[1] = l1 * (2.0 * l1 - 1.0);
  out[2] = l2 * (2.0 * l2 - 1.0);
  out[3] = 4.0 * l1 * l2;
  out[4] = 4.0 * l0 * l2;
  out[5] = 4.0 * l0 * l1;
}

void p2_ref_gradients(double l1, double l2, double out[6][2]) {
  const double l0 = 1.0 - l1 - l2;
  out[0][0] = 1.0 - 4.0 * l0;
  out[0][1] = 1.0 - 4.0 * l0;
  out[1][0] = 4.0 * l1 - 1.0;
  out[1][1] = 0.0;
  out[2][0] = 0.0;
  out[2][1] = 4.0 * l2 - 1.0;
  out[3][0] = 4.0 * l2;
  out[3][1] = 4.0 * l1;
  out[4][0] = -4.0 * l2;
  out[4][1] = 4.0 * (l0 - l2);
  out[5][0] = 4.0 * (l0 - l1);
  out[5][1] = -4.0 * l1;
}

void p2_ref_hessians(double out[6][3]) {
  static const double h[6][3] = {
      {4.0, 4.0, 4.0},  {4.0, 0.0, 0.0},  {0.0, 0.0, 4.0},
      {0.0, 4.0, 0.0},  {0.0, -4.0, -8.0}, {-8.0, -4.0, 0.0},
  };
  for (int a = 0; a < 6; ++a)
    for (int k = 0; k < 3; ++k) out[a][k] = h[a][k];
}

ElementGeom ElementGeom::from(const Mesh2D& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  ElementGeom g;
  g.x0 = mesh.vertices[tri[0]];
  g.jac.col(0) = mesh.vertices[tri[1]] - g.x0;
  g.jac.col(1) = mesh.vertices[tri[2]] - g.x0;
  g.det = g.jac(0, 0) * g.jac(1, 1) - g.jac(0, 1) * g.jac(1, 0);
  Mat2 inv;
  inv << g.jac(1, 1), -g.jac(0, 1), -g.jac(1, 0), g.jac(0, 0);
  inv /= g.det;
  g.jinv_t = inv.transpose();
  return g;
}

std::array<int, 6> element_nodes(const Mesh2D& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const auto& te = mesh.tri_edges[t];
  const int nv = mesh.num_vertices();
  return {tri[0], tri[1], tri[2], nv + te[0], nv + te[1], nv + te[2]};
}

StokesBlocks assemble_stokes_blocks(const Mesh2D& mesh, const DofMap& dofs, double mu,
                                    double rho) {
  StokesBlocks blocks;
  blocks.mean_row.assign(dofs.n_pressure, 0.0);
  const auto& rule = triangle_rule();

  double vals[6], ref_grad[6][2];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = ElementGeom::from(mesh, t);
    const auto nodes = element_nodes(mesh, t);
    const auto& tri = mesh.triangles[t];

    double k_loc[6][6] = {};
    double m_loc[6][6] = {};
    double b_loc[3][6][2] = {};  // pressure vertex x velocity node x component
    double p_int[3] = {};

    for (const auto& qp : rule) {
      p2_values(qp.l1, qp.l2, vals);
      p2_ref_gradients(qp.l1, qp.l2, ref_grad);
      Vec2 grad[6];
      for (int a = 0; a < 6; ++a)
        grad[a] = geom.jinv_t * Vec2(ref_grad[a][0], ref_grad[a][1]);
      const double w = qp.w * geom.det;
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
          k_loc[a][b] += w * grad[a].dot(grad[b]);
          m_loc[a][b] += w * vals[a] * vals[b];
        }
      }
      const double lam[3] = {qp.l0, qp.l1, qp.l2};
      for (int q = 0; q < 3; ++q) {
        p_int[q] += w * lam[q];
        for (int b = 0; b < 6; ++b)
          for (int c = 0; c < 2; ++c) b_loc[q][b][c] += w * lam[q] * grad[b][c];
      }
    }

    for (int a = 0; a < 6; ++a) {
      for (int b = 0; b < 6; ++b) {
        for (int c = 0; c < 2; ++c) {
          const int i = dofs.vel_dof(nodes[a], c), j = dofs.vel_dof(nodes[b], c);
          if (mu != 0.0) blocks.viscous.emplace_back(i, j, mu * k_loc[a][b]);
          if (rho != 0.0) blocks.mass.emplace_back(i, j, rho * m_loc[a][b]);
        }
      }
    }
    for (int q = 0; q < 3; ++q) {
      blocks.mean_row[tri[q]] += p_int[q];
      for (int b = 0; b < 6; ++b)
        for (int c = 0; c < 2; ++c)
          blocks.divergence.emplace_back(tri[q], dofs.vel_dof(nodes[b], c), b_loc[q][b][c]);
    }
  }
  return blocks;
}

std::vector<Triplet> assemble_convection(const Mesh2D& mesh, const DofMap& dofs,
                                         const std::vector<Vec2>& advecting,
                                         const std::vector<Vec2>& mesh_velocity, double rho,
                                         bool antisymmetrize) {
  std::vector<Triplet> out;
  const auto& rule = triangle_rule();
  double vals[6], ref_grad[6][2];

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = ElementGeom::from(mesh, t);
    const auto nodes = element_nodes(mesh, t);
    double c_loc[6][6] = {};

    for (const auto& qp : rule) {
      p2_values(qp.l1, qp.l2, vals);
      p2_ref_gradients(qp.l1, qp.l2, ref_grad);
      Vec2 grad[6];
      for (int a = 0; a < 6; ++a)
        grad[a] = geom.jinv_t * Vec2(ref_grad[a][0], ref_grad[a][1]);
      Vec2 w_q = Vec2::Zero(), v_q = Vec2::Zero();
      for (int a = 0; a < 6; ++a) {
        w_q += vals[a] * advecting[nodes[a]];
        v_q += vals[a] * mesh_velocity[nodes[a]];
      }
      const double w = qp.w * geom.det;
      if (!antisymmetrize) {
        const Vec2 rel = w_q - v_q;
        for (int a = 0; a < 6; ++a) {
          const double adv = rel.dot(grad[a]);
          for (int b = 0; b < 6; ++b) c_loc[a][b] += -rho * w * adv * vals[b];
        }
      } else {
        for (int a = 0; a < 6; ++a) {
          const double wa = w_q.dot(grad[a]);
          const double va = v_q.dot(grad[a]);
          for (int b = 0; b < 6; ++b) {
            const double wb = w_q.dot(grad[b]);
            c_loc[a][b] += -rho * w * 0.5 * (wa * vals[b] - wb * vals[a]);
            c_loc[a][b] += rho * w * va * vals[b];
          }
        }
      }
    }
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        for (int c = 0; c < 2; ++c)
          out.emplace_back(dofs.vel_dof(nodes[a], c), dofs.vel_dof(nodes[b], c), c_loc[a][b]);
  }
  return out;
}

std::vector<Triplet> assemble_scalar_p2_stiffness(const Mesh2D& mesh) {
  std::vector<Triplet> out;
  const auto& rule = triangle_rule();
  double ref_grad[6][2];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = ElementGeom::from(mesh, t);
    const auto nodes = element_nodes(mesh, t);
    double k_loc[6][6] = {};
    for (const auto& qp : rule) {
      p2_ref_gradients(qp.l1, qp.l2, ref_grad);
      Vec2 grad[6];
      for (int a = 0; a < 6; ++a)
        grad[a] = geom.jinv_t * Vec2(ref_grad[a][0], ref_grad[a][1]);
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) k_loc[a][b] += qp.w * geom.det * grad[a].dot(grad[b]);
    }
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) out.emplace_back(nodes[a], nodes[b], k_loc[a][b]);
  }
  return out;
}

std::vector<Triplet> assemble_scalar_p1_stiffness(const Mesh2D& mesh) {
  std::vector<Triplet> out;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = ElementGeom::from(mesh, t);
    const auto& tri = mesh.triangles[t];
    // Linear barycentric gradients are constant; one-point rule is exact.
    const Vec2 g[3] = {geom.jinv_t * Vec2(-1.0, -1.0), geom.jinv_t * Vec2(1.0, 0.0),
                       geom.jinv_t * Vec2(0.0, 1.0)};
    const double area = 0.5 * geom.det;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) out.emplace_back(tri[a], tri[b], area * g[a].dot(g[b]));
  }
  return out;
}

Eigen::VectorXd assemble_forcing(const Mesh2D& mesh, const DofMap& dofs,
                                 const std::function<Vec2(const Vec2&)>& f) {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dofs.n_vel_dofs());
  const auto& rule = triangle_rule();
  double vals[6];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = ElementGeom::from(mesh, t);
    const auto nodes = element_nodes(mesh, t);
    for (const auto& qp : rule) {
      p2_values(qp.l1, qp.l2, vals);
      const Vec2 fx = f(geom.map(qp.l1, qp.l2));
      const double w = qp.w * geom.det;
      for (int a = 0; a < 6; ++a)
        for (int c = 0; c < 2; ++c) rhs[dofs.vel_dof(nodes[a], c)] += w * vals[a] * fx[c];
    }
  }
  return rhs;
}

SpMat to_sparse(int rows, int cols, const std::vector<Triplet>& triplets) {
  SpMat m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

SparseSystem build_saddle_system(const DofMap& dofs, const std::vector<Triplet>& vel_block,
                                 const std::vector<Triplet>& divergence,
                                 const std::vector<double>& mean_row,
                                 const Eigen::VectorXd& vel_rhs,
                                 const Eigen::VectorXd& dirichlet_values) {
  const int n = dofs.system_size();
  const int np = dofs.n_pressure;
  SparseSystem sys;
  sys.mean_row = dofs.n_free + np;
  sys.rhs = Eigen::VectorXd::Zero(n);

  std::vector<Triplet> trip;
  trip.reserve(vel_block.size() + 2 * divergence.size() + 2 * np);

  for (const auto& t : vel_block) {
    const int fi = dofs.free_index[t.row()], fj = dofs.free_index[t.col()];
    if (fi < 0) continue;
    if (fj >= 0)
      trip.emplace_back(fi, fj, t.value());
    else
      sys.rhs[fi] -= t.value() * dirichlet_values[t.col()];
  }
  // Constraint rows enter negated so the Stokes sub-blocks stay symmetric
  // ( [K, -B^T; -B, 0] ); the transpose carries the momentum pressure term.
  for (const auto& t : divergence) {
    const int q = dofs.n_free + t.row();
    const int fj = dofs.free_index[t.col()];
    if (fj >= 0) {
      trip.emplace_back(q, fj, -t.value());
      trip.emplace_back(fj, q, -t.value());
    } else {
      sys.rhs[q] += t.value() * dirichlet_values[t.col()];
    }
  }
  for (int q = 0; q < np; ++q) {
    trip.emplace_back(dofs.n_free + q, sys.mean_row, mean_row[q]);
    trip.emplace_back(sys.mean_row, dofs.n_free + q, mean_row[q]);
  }
  if (vel_rhs.size() > 0) {
    for (int i = 0; i < dofs.n_vel_dofs(); ++i) {
      const int fi = dofs.free_index[i];
      if (fi >= 0) sys.rhs[fi] += vel_rhs[i];
    }
  }
  sys.matrix = to_sparse(n, n, trip);
  return sys;
}

FieldPair solve_saddle_point(const SparseSystem& sys, const DofMap& dofs,
                             const Eigen::VectorXd& dirichlet_values) {
  Eigen::SparseLU<SpMat> lu;
  lu.compute(sys.matrix);
  if (lu.info() != Eigen::Success) throw SingularSystem("saddle-point factorization failed");
  const Eigen::VectorXd x = lu.solve(sys.rhs);
  if (lu.info() != Eigen::Success) throw SingularSystem("saddle-point solve failed");

  const double bnorm = sys.rhs.lpNorm<Eigen::Infinity>();
  const double rnorm = (sys.matrix * x - sys.rhs).lpNorm<Eigen::Infinity>();
  const double rel = bnorm > 0.0 ? rnorm / bnorm : rnorm;
  if (!(rel <= 1e-10))
    throw ResidualTooLarge("saddle-point residual above tolerance", rel);

  FieldPair out;
  out.velocity = Eigen::VectorXd::Zero(dofs.n_vel_dofs());
  for (int i = 0; i < dofs.n_vel_dofs(); ++i) {
    const int fi = dofs.free_index[i];
    out.velocity[i] = fi >= 0 ? x[fi] : dirichlet_values[i];
  }
  out.pressure = x.segment(dofs.n_free, dofs.n_pressure);
  out.multiplier = x[sys.mean_row];
  return out;
}

FieldPair solve_steady_stokes(const Mesh2D& mesh, const DofMap& dofs, double mu,
                              const Eigen::VectorXd& dirichlet_values,
                              const std::function<Vec2(const Vec2&)>* forcing) {
  const auto blocks = assemble_stokes_blocks(mesh, dofs, mu, 0.0);
  Eigen::VectorXd rhs;
  if (forcing) rhs = assemble_forcing(mesh, dofs, *forcing);
  const auto sys =
      build_saddle_system(dofs, blocks.viscous, blocks.divergence, blocks.mean_row, rhs,
                          dirichlet_values);
  return solve_saddle_point(sys, dofs, dirichlet_values);
}

double divergence_residual(const Mesh2D& mesh, const DofMap& dofs,
                           const Eigen::VectorXd& velocity) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(dofs.n_pressure);
  const auto& rule = triangle_rule();
  double ref_grad[6][2];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = ElementGeom::from(mesh, t);
    const auto nodes = element_nodes(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (const auto& qp : rule) {
      p2_ref_gradients(qp.l1, qp.l2, ref_grad);
      double div = 0.0;
      for (int a = 0; a < 6; ++a) {
        const Vec2 g = geom.jinv_t * Vec2(ref_grad[a][0], ref_grad[a][1]);
        div += g.x() * velocity[dofs.vel_dof(nodes[a], 0)] +
               g.y() * velocity[dofs.vel_dof(nodes[a], 1)];
      }
      const double lam[3] = {qp.l0, qp.l1, qp.l2};
      for (int q = 0; q < 3; ++q) acc[tri[q]] += qp.w * geom.det * lam[q] * div;
    }
  }
  return acc.lpNorm<Eigen::Infinity>();
}

double velocity_l2_error(const Mesh2D& mesh, const DofMap& dofs, const Eigen::VectorXd& u,
                         const std::function<Vec2(const Vec2&)>& exact) {
  double err2 = 0.0;
  const auto& rule = triangle_rule();
  double vals[6];
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = ElementGeom::from(mesh, t);
    const auto nodes = element_nodes(mesh, t);
    for (const auto& qp : rule) {
      p2_values(qp.l1, qp.l2, vals);
      Vec2 uh = Vec2::Zero();
      for (int a = 0; a < 6; ++a)
        uh += vals[a] * Vec2(u[dofs.vel_dof(nodes[a], 0)], u[dofs.vel_dof(nodes[a], 1)]);
      err2 += qp.w * geom.det * (uh - exact(geom.map(qp.l1, qp.l2))).squaredNorm();
    }
  }
  return std::sqrt(err2);
}

double pressure_l2_error(const Mesh2D& mesh, const Eigen::VectorXd& p,
                         const std::function<double(const Vec2&)>& exact) {
  double err2 = 0.0;
  const auto& rule = triangle_rule();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = ElementGeom::from(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (const auto& qp : rule) {
      const double lam[3] = {qp.l0, qp.l1, qp.l2};
      double ph = 0.0;
      for (int q = 0; q < 3; ++q) ph += lam[q] * p[tri[q]];
      const double diff = ph - exact(geom.map(qp.l1, qp.l2));
      err2 += qp.w * geom.det * diff * diff;
    }
  }
  return std::sqrt(err2);
}

Eigen::VectorXd interpolate_velocity(const Mesh2D& mesh, const DofMap& dofs,
                                     const std::function<Vec2(const Vec2&)>& f) {
  Eigen::VectorXd u(dofs.n_vel_dofs());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const Vec2 v = f(mesh.node(i));
    u[dofs.vel_dof(i, 0)] = v.x();
    u[dofs.vel_dof(i, 1)] = v.y();
  }
  return u;
}

std::vector<Vec2> to_nodal(const DofMap& dofs, const Eigen::VectorXd& velocity) {
  std::vector<Vec2> out(dofs.n_nodes);
  for (int i = 0; i < dofs.n_nodes; ++i)
    out[i] = Vec2(velocity[2 * i], velocity[2 * i + 1]);
  return out;
}

Eigen::VectorXd from_nodal(const DofMap& dofs, const std::vector<Vec2>& values) {
  Eigen::VectorXd out(dofs.n_vel_dofs());
  for (int i = 0; i < dofs.n_nodes; ++i) {
    out[2 * i] = values[i].x();
    out[2 * i + 1] = values[i].y();
  }
  return out;
}

int locate_point(const Mesh2D& mesh, const Vec2& x, Vec2* bary) {
  constexpr double tol = 1e-12;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto geom = ElementGeom::from(mesh, t);
    const Vec2 local = geom.jinv_t.transpose() * (x - geom.x0);
    const double l1 = local.x(), l2 = local.y();
    if (l1 >= -tol && l2 >= -tol && l1 + l2 <= 1.0 + tol) {
      if (bary) *bary = Vec2(l1, l2);
      return t;
    }
  }
  return -1;
}

Vec2 eval_velocity_at(const Mesh2D& mesh, const DofMap& dofs, const Eigen::VectorXd& u,
                      const Vec2& x) {
  Vec2 bary;
  const int t = locate_point(mesh, x, &bary);
  if (t < 0) throw SimError("point outside mesh");
  const auto nodes = element_nodes(mesh, t);
  double vals[6];
  p2_values(bary.x(), bary.y(), vals);
  Vec2 out = Vec2::Zero();
  for (int a = 0; a < 6; ++a)
    out += vals[a] * Vec2(u[dofs.vel_dof(nodes[a], 0)], u[dofs.vel_dof(nodes[a], 1)]);
  return out;
}

double eval_pressure_at(const Mesh2D& mesh, const Eigen::VectorXd& p, const Vec2& x) {
  Vec2 bary;
  const int t = locate_point(mesh, x, &bary);
  if (t < 0) throw SimError("point outside mesh");
  const auto& tri = mesh.triangles[t];
  const double l1 = bary.x(), l2 = bary.y();
  return (1.0 - l1 - l2) * p[tri[0]] + l1 * p[tri[1]] + l2 * p[tri[2]];
}

void write_matrix_coo(const SpMat& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  char buf[80];
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g", static_cast<long>(it.row()),
                    static_cast<long>(it.col()), it.value());
      out << buf << "\n";
    }
  }
}

}  // namespace fsi
