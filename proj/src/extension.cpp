#include "fsi/extension.hpp"

#include <Eigen/SparseLU>

#include "fsi/errors.hpp"

namespace fsi {
namespace {

// Scalar quadratic Laplace solve with nodal Dirichlet data on all boundary
// nodes; the stiffness of the free block is factored once per mesh.
struct ScalarHarmonicSolver {
  explicit ScalarHarmonicSolver(const Mesh2D& mesh) : mesh_(mesh) {
    const int n = mesh.num_nodes();
    free_index_.assign(n, -1);
    int next = 0;
    for (int i = 0; i < n; ++i)
      if (mesh.node_tag(i) == BoundaryTag::Interior) free_index_[i] = next++;
    n_free_ = next;

    const auto stiff = assemble_scalar_p2_stiffness(mesh);
    std::vector<Triplet> reduced;
    reduced.reserve(stiff.size());
    coupling_.clear();
    for (const auto& t : stiff) {
      const int fi = free_index_[t.row()], fj = free_index_[t.col()];
      if (fi < 0) continue;
      if (fj >= 0)
        reduced.emplace_back(fi, fj, t.value());
      else
        coupling_.push_back({fi, t.col(), t.value()});
    }
    matrix_ = to_sparse(n_free_, n_free_, reduced);
    lu_.compute(matrix_);
    if (lu_.info() != Eigen::Success)
      throw SingularSystem("harmonic extension factorization failed");
  }

  // data holds boundary values at constrained nodes; other entries ignored.
  Eigen::VectorXd solve(const Eigen::VectorXd& data) const {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_free_);
    for (const auto& c : coupling_) rhs[c.row] -= c.value * data[c.col];
    const Eigen::VectorXd x = lu_.solve(rhs);
    if (lu_.info() != Eigen::Success) throw SingularSystem("harmonic extension solve failed");
    Eigen::VectorXd full = data;
    for (int i = 0; i < mesh_.num_nodes(); ++i)
      if (free_index_[i] >= 0) full[i] = x[free_index_[i]];
    return full;
  }

  const Mesh2D& mesh_;
  std::vector<int> free_index_;
  int n_free_ = 0;
  struct Coupling {
    int row, col;
    double value;
  };
  std::vector<Coupling> coupling_;
  SpMat matrix_;
  Eigen::SparseLU<SpMat> lu_;
};

}  // namespace

ExtensionField harmonic_extension(const Mesh2D& mesh, const Vec2& q, const Vec2& v,
                                  double omega, ExtensionKind kind) {
  const int n = mesh.num_nodes();
  ExtensionField out(n, Vec2::Zero());

  if (kind == ExtensionKind::Stokes) {
    const DofMap dofs = DofMap::build(mesh);
    Eigen::VectorXd data = Eigen::VectorXd::Zero(dofs.n_vel_dofs());
    for (int i = 0; i < n; ++i) {
      if (mesh.node_tag(i) != BoundaryTag::Body) continue;
      const Vec2 val = rigid_velocity(v, omega, q, mesh.node(i));
      data[dofs.vel_dof(i, 0)] = val.x();
      data[dofs.vel_dof(i, 1)] = val.y();
    }
    const FieldPair sol = solve_steady_stokes(mesh, dofs, 1.0, data);
    for (int i = 0; i < n; ++i)
      out[i] = Vec2(sol.velocity[2 * i], sol.velocity[2 * i + 1]);
    return out;
  }

  ScalarHarmonicSolver solver(mesh);
  Eigen::VectorXd dx = Eigen::VectorXd::Zero(n), dy = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (mesh.node_tag(i) != BoundaryTag::Body) continue;
    const Vec2 val = rigid_velocity(v, omega, q, mesh.node(i));
    dx[i] = val.x();
    dy[i] = val.y();
  }
  const Eigen::VectorXd sx = solver.solve(dx);
  const Eigen::VectorXd sy = solver.solve(dy);
  for (int i = 0; i < n; ++i) out[i] = Vec2(sx[i], sy[i]);
  return out;
}

CutoffField cutoff_field(const Mesh2D& mesh) {
  const int n = mesh.num_nodes();
  ScalarHarmonicSolver solver(mesh);
  Eigen::VectorXd data = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i)
    if (mesh.node_tag(i) == BoundaryTag::Body) data[i] = 1.0;
  const Eigen::VectorXd sol = solver.solve(data);
  return CutoffField(sol.data(), sol.data() + n);
}

Vec2 scalar_gradient(const Mesh2D& mesh, const CutoffField& field, int t, double l1,
                     double l2) {
  const auto geom = ElementGeom::from(mesh, t);
  const auto nodes = element_nodes(mesh, t);
  double ref_grad[6][2];
  p2_ref_gradients(l1, l2, ref_grad);
  Vec2 g = Vec2::Zero();
  for (int a = 0; a < 6; ++a)
    g += field[nodes[a]] * (geom.jinv_t * Vec2(ref_grad[a][0], ref_grad[a][1]));
  return g;
}

double eval_scalar_at(const Mesh2D& mesh, const CutoffField& field, const Vec2& x) {
  Vec2 bary;
  const int t = locate_point(mesh, x, &bary);
  if (t < 0) throw SimError("point outside mesh");
  const auto nodes = element_nodes(mesh, t);
  double vals[6];
  p2_values(bary.x(), bary.y(), vals);
  double s = 0.0;
  for (int a = 0; a < 6; ++a) s += vals[a] * field[nodes[a]];
  return s;
}

}  // namespace fsi
