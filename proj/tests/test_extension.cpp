#include <doctest.h>

#include <cmath>
#include <random>

#include "fsi/extension.hpp"
#include "fsi/fem.hpp"
#include "fsi/geometry.hpp"
#include "fsi/mesh.hpp"

using namespace fsi;

namespace {

const Geometry kGeom;

const Mesh2D& disk_mesh() {
  static const Mesh2D mesh = generate_mesh(kGeom);
  return mesh;
}

}  // namespace

TEST_CASE("zero boundary data extends to the zero field") {
  const ExtensionField ext =
      harmonic_extension(disk_mesh(), kGeom.disk_center, Vec2::Zero(), 0.0);
  double largest = 0.0;
  for (const Vec2& e : ext) largest = std::max(largest, e.norm());
  CHECK(largest <= 1e-12);
}

TEST_CASE("extension matches the rigid data on the body and vanishes on the walls") {
  const Mesh2D& mesh = disk_mesh();
  const Vec2 v(0.3, -0.7);
  const double omega = 1.4;
  const ExtensionField ext = harmonic_extension(mesh, kGeom.disk_center, v, omega);
  REQUIRE(static_cast<int>(ext.size()) == mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (mesh.node_tag(i) == BoundaryTag::Body) {
      const Vec2 data = rigid_velocity(v, omega, kGeom.disk_center, mesh.node(i));
      CHECK((ext[i] - data).norm() <= 1e-12);
    }
    if (mesh.node_tag(i) == BoundaryTag::Wall) CHECK(ext[i].norm() <= 1e-12);
  }
}

TEST_CASE("componentwise bounds for a falling body") {
  const Mesh2D& mesh = disk_mesh();
  const ExtensionField ext =
      harmonic_extension(mesh, kGeom.disk_center, Vec2(0.0, -1.0), 0.0);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    // Horizontal data is identically zero; vertical data spans [-1, 0].
    CHECK(std::abs(ext[i].x()) <= 1e-10);
    CHECK(ext[i].y() <= 0.05);
    CHECK(ext[i].y() >= -1.05);
  }
}

TEST_CASE("pure rotation stays tangential on the body ring") {
  const Mesh2D& mesh = disk_mesh();
  const ExtensionField ext = harmonic_extension(mesh, kGeom.disk_center, Vec2::Zero(), 1.0);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (mesh.node_tag(i) != BoundaryTag::Body) continue;
    const Vec2 radial = mesh.node(i) - kGeom.disk_center;
    CHECK(std::abs(ext[i].dot(radial)) <= 1e-12);
    CHECK(ext[i].norm() == doctest::Approx(radial.norm()).epsilon(1e-10));
  }
}

TEST_CASE("extension is linear in the rigid data") {
  const Mesh2D& mesh = disk_mesh();
  const Vec2 q = kGeom.disk_center;
  const ExtensionField a = harmonic_extension(mesh, q, Vec2(0.2, -0.1), 0.5);
  const ExtensionField b = harmonic_extension(mesh, q, Vec2(-0.05, 0.3), -1.1);
  const ExtensionField sum = harmonic_extension(mesh, q, Vec2(0.15, 0.2), -0.6);
  const ExtensionField twice = harmonic_extension(mesh, q, Vec2(0.4, -0.2), 1.0);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    CHECK((a[i] + b[i] - sum[i]).norm() <= 1e-12);
    CHECK((2.0 * a[i] - twice[i]).norm() <= 1e-12);
  }
}

TEST_CASE("divergence-free extension variant") {
  const Mesh2D& mesh = disk_mesh();
  const DofMap dofs = DofMap::build(mesh);
  const Vec2 v(0.1, -0.4);
  const double omega = 0.8;
  const ExtensionField ext =
      harmonic_extension(mesh, kGeom.disk_center, v, omega, ExtensionKind::Stokes);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (mesh.node_tag(i) == BoundaryTag::Body) {
      const Vec2 data = rigid_velocity(v, omega, kGeom.disk_center, mesh.node(i));
      CHECK((ext[i] - data).norm() <= 1e-10);
    }
    if (mesh.node_tag(i) == BoundaryTag::Wall) CHECK(ext[i].norm() <= 1e-10);
  }
  CHECK(divergence_residual(mesh, dofs, from_nodal(dofs, ext)) <= 1e-9);
}

TEST_CASE("cutoff field bridges one on the body to zero on the walls") {
  const Mesh2D& mesh = disk_mesh();
  const CutoffField zeta = cutoff_field(mesh);
  REQUIRE(static_cast<int>(zeta.size()) == mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (mesh.node_tag(i) == BoundaryTag::Body) CHECK(zeta[i] == doctest::Approx(1.0));
    if (mesh.node_tag(i) == BoundaryTag::Wall) CHECK(std::abs(zeta[i]) <= 1e-12);
    CHECK(zeta[i] >= -1e-10);
    CHECK(zeta[i] <= 1.0 + 1e-10);
  }

  SUBCASE("values decay along a ray toward the wall") {
    double prev = 2.0;
    for (int k = 0; k <= 12; ++k) {
      const double radius = kGeom.disk_radius + 0.01 + k * (0.37 / 12.0);
      const double val =
          eval_scalar_at(mesh, zeta, kGeom.disk_center + Vec2(radius, 0.0));
      CHECK(val <= prev + 1e-3);
      prev = val;
    }
    CHECK(prev <= 0.1);  // two hundredths from the wall
  }
}

TEST_CASE("scalar gradient of a linear nodal field is its slope") {
  const Mesh2D& mesh = disk_mesh();
  CutoffField field(mesh.num_nodes());
  const double a = 1.7, b = -0.6, c = 0.25;
  for (int i = 0; i < mesh.num_nodes(); ++i)
    field[i] = a * mesh.node(i).x() + b * mesh.node(i).y() + c;
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> unif(0.05, 0.9);
  for (int t = 0; t < mesh.num_triangles(); t += 7) {
    // Curved-edge elements carry off-chord midpoints; the interpolant of a
    // linear field is only linear on straight elements.
    bool curved = false;
    for (int k = 0; k < 3; ++k)
      curved |= (mesh.edge_tag[mesh.tri_edges[t][k]] == BoundaryTag::Body);
    if (curved) continue;
    const double l1 = unif(rng) * 0.5, l2 = unif(rng) * 0.5;
    const Vec2 g = scalar_gradient(mesh, field, t, l1, l2);
    CHECK(g.x() == doctest::Approx(a).epsilon(1e-11));
    CHECK(g.y() == doctest::Approx(b).epsilon(1e-11));
  }
}
