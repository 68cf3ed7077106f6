#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "fsi/mesh.hpp"

namespace fsi {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Velocity is quadratic (vertex + edge-midpoint nodes, two interleaved
// components), pressure linear (vertex nodes).  Velocity components of a node
// are constrained together: every non-interior node is Dirichlet.
struct DofMap {
  int n_nodes = 0;
  int n_pressure = 0;
  std::vector<bool> dirichlet;  // per velocity node
  std::vector<int> free_index;  // per velocity dof; -1 when constrained
  int n_free = 0;

  static DofMap build(const Mesh2D& mesh);

  int vel_dof(int node, int comp) const { return 2 * node + comp; }
  int n_vel_dofs() const { return 2 * n_nodes; }
  // Saddle system: free velocity dofs, pressure dofs, one mean-pressure row.
  int system_size() const { return n_free + n_pressure + 1; }
};

struct QuadPoint {
  double l0, l1, l2;  // barycentric
  double w;           // weights sum to the reference area 1/2
};
// Degree-5 seven-point triangle rule.
const std::vector<QuadPoint>& triangle_rule();

struct EdgeQuadPoint {
  double t, w;  // on [0,1]; weights sum to 1
};
// Three-point Gauss rule, exact through degree 5.
const std::vector<EdgeQuadPoint>& edge_rule();

// Quadratic shapes on the reference triangle; local nodes 0..2 are vertices,
// 3+k sits on the edge opposite vertex k.
void p2_values(double l1, double l2, double out[6]);
void p2_ref_gradients(double l1, double l2, double out[6][2]);
// Constant reference Hessians (xx, xy, yy) of the quadratic shapes.
void p2_ref_hessians(double out[6][3]);

struct ElementGeom {
  Vec2 x0;
  Mat2 jac;     // columns v1-v0, v2-v0
  Mat2 jinv_t;  // inverse transpose, maps reference gradients to physical
  double det;   // twice the area, positive on valid meshes

  static ElementGeom from(const Mesh2D& mesh, int t);
  Vec2 map(double l1, double l2) const { return x0 + jac * Vec2(l1, l2); }
};

// Global velocity nodes of element t in local order.
std::array<int, 6> element_nodes(const Mesh2D& mesh, int t);

struct StokesBlocks {
  std::vector<Triplet> viscous;     // mu * grad(u):grad(phi), velocity x velocity
  std::vector<Triplet> mass;        // rho * u.phi, velocity x velocity
  std::vector<Triplet> divergence;  // psi * div(u), pressure rows x velocity cols
  std::vector<double> mean_row;     // integral of each pressure basis function
};
StokesBlocks assemble_stokes_blocks(const Mesh2D& mesh, const DofMap& dofs, double mu,
                                    double rho);

// Momentum-row convection block.  Plain form: -rho * ((w - V).grad phi_i).u_j;
// antisymmetrized replaces the w part by the half split
// -rho * (  (w.grad phi_i).u_j - (w.grad u_j).phi_i ) / 2 and keeps the V part.
std::vector<Triplet> assemble_convection(const Mesh2D& mesh, const DofMap& dofs,
                                         const std::vector<Vec2>& advecting,
                                         const std::vector<Vec2>& mesh_velocity, double rho,
                                         bool antisymmetrize);

// Scalar quadratic Laplace stiffness (unit coefficient), one dof per node.
std::vector<Triplet> assemble_scalar_p2_stiffness(const Mesh2D& mesh);
// Scalar linear Laplace stiffness, one dof per vertex.
std::vector<Triplet> assemble_scalar_p1_stiffness(const Mesh2D& mesh);

// Volumetric momentum forcing integral f.phi_i over the mesh.
Eigen::VectorXd assemble_forcing(const Mesh2D& mesh, const DofMap& dofs,
                                 const std::function<Vec2(const Vec2&)>& f);

SpMat to_sparse(int rows, int cols, const std::vector<Triplet>& triplets);

struct FieldPair {
  Eigen::VectorXd velocity;  // 2 * n_nodes
  Eigen::VectorXd pressure;  // n_pressure
  double multiplier = 0.0;   // mean-pressure constraint multiplier
};

struct SparseSystem {
  SpMat matrix;
  Eigen::VectorXd rhs;
  int mean_row = 0;  // index of the mean-pressure constraint row
};

// Assembles the constrained saddle system: the velocity block rows/columns of
// Dirichlet dofs are eliminated symmetrically into the right-hand side, the
// divergence block enters once as constraint rows (negated, keeping the Stokes
// part symmetric) and once transposed in the momentum rows, and the last row
// pins the discrete pressure mean to zero through a multiplier.
SparseSystem build_saddle_system(const DofMap& dofs, const std::vector<Triplet>& vel_block,
                                 const std::vector<Triplet>& divergence,
                                 const std::vector<double>& mean_row,
                                 const Eigen::VectorXd& vel_rhs,
                                 const Eigen::VectorXd& dirichlet_values);

// Direct sparse LU solve with a relative residual check (1e-10 in the max
// norm); scatters the solution back to full velocity/pressure vectors with the
// Dirichlet values filled in.
FieldPair solve_saddle_point(const SparseSystem& sys, const DofMap& dofs,
                             const Eigen::VectorXd& dirichlet_values);

// Steady Stokes solve with prescribed boundary values and optional forcing.
FieldPair solve_steady_stokes(const Mesh2D& mesh, const DofMap& dofs, double mu,
                              const Eigen::VectorXd& dirichlet_values,
                              const std::function<Vec2(const Vec2&)>* forcing = nullptr);

// Max over linear test functions of | integral q div(u) |, by direct quadrature.
double divergence_residual(const Mesh2D& mesh, const DofMap& dofs,
                           const Eigen::VectorXd& velocity);

double velocity_l2_error(const Mesh2D& mesh, const DofMap& dofs, const Eigen::VectorXd& u,
                         const std::function<Vec2(const Vec2&)>& exact);
double pressure_l2_error(const Mesh2D& mesh, const Eigen::VectorXd& p,
                         const std::function<double(const Vec2&)>& exact);

// Nodal interpolation helpers (values at the quadratic node positions).
Eigen::VectorXd interpolate_velocity(const Mesh2D& mesh, const DofMap& dofs,
                                     const std::function<Vec2(const Vec2&)>& f);

std::vector<Vec2> to_nodal(const DofMap& dofs, const Eigen::VectorXd& velocity);
Eigen::VectorXd from_nodal(const DofMap& dofs, const std::vector<Vec2>& values);

// Brute-force element search; returns -1 when x is outside the mesh, else the
// triangle index with barycentric coordinates (l1, l2) in bary.
int locate_point(const Mesh2D& mesh, const Vec2& x, Vec2* bary);
Vec2 eval_velocity_at(const Mesh2D& mesh, const DofMap& dofs, const Eigen::VectorXd& u,
                      const Vec2& x);
double eval_pressure_at(const Mesh2D& mesh, const Eigen::VectorXd& p, const Vec2& x);

// COO text dump "i j value" per line, for debugging.
void write_matrix_coo(const SpMat& m, const std::string& path);

}  // namespace fsi
