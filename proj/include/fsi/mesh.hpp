#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fsi/geometry.hpp"

namespace fsi {

enum class BoundaryTag : std::uint8_t {
  Interior = 0,
  Wall = 1,  // outer container boundary
  Body = 2,  // disk boundary
};

// Conforming triangle mesh of the box-minus-disk domain.  Triangles are CCW;
// edges are unique vertex pairs (a < b); edge midpoints carry the second-order
// node coordinates (on the disk circle for Body edges, endpoint averages
// elsewhere).  Treat instances as immutable: mutating operations return copies.
struct Mesh2D {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryTag> vertex_tag;

  std::vector<std::array<int, 2>> edges;
  std::vector<Vec2> edge_midpoints;
  std::vector<BoundaryTag> edge_tag;
  // Edge opposite each local vertex: tri_edges[t][k] joins the other two vertices.
  std::vector<std::array<int, 3>> tri_edges;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  // Second-order nodes: vertices first, then edge midpoints.
  int num_nodes() const { return num_vertices() + num_edges(); }

  const Vec2& node(int i) const {
    return i < num_vertices() ? vertices[i] : edge_midpoints[i - num_vertices()];
  }
  BoundaryTag node_tag(int i) const {
    return i < num_vertices() ? vertex_tag[i] : edge_tag[i - num_vertices()];
  }

  double signed_area(int t) const {
    const auto& tri = triangles[t];
    return 0.5 * twice_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
  }
};

// Rebuilds edges, midpoints, tri_edges and edge tags from vertices + triangles
// + vertex tags.  A boundary edge inherits the shared tag of its endpoints.
void build_edges(Mesh2D& mesh);

// Generates the body-fitted mesh: graded node rings around the disk stitched
// to a jittered background grid by Delaunay triangulation.
Mesh2D generate_mesh(const Geometry& geom);

// Uniform nx-by-ny grid of the box split into triangles; whole boundary is Wall.
Mesh2D generate_box_mesh(const Box& box, int nx, int ny);

// Displaces every node (vertices and edge midpoints) by its own displacement
// vector; throws ElementInversion if any triangle area becomes non-positive.
Mesh2D move_nodes(const Mesh2D& mesh, const std::vector<Vec2>& displacement);

// Radially projects Body vertices and edge midpoints onto the circle
// |x - center| = radius; throws SnapTooLarge beyond 0.2 * radius.
Mesh2D snap_disk_boundary(const Mesh2D& mesh, const Vec2& center, double radius);

// Smallest distance between a Body vertex and a Wall edge segment.
double min_gap(const Mesh2D& mesh);

double total_area(const Mesh2D& mesh);
double min_angle_deg(const Mesh2D& mesh);
double mean_edge_length(const Mesh2D& mesh);

// Plain text interchange: "nodes N elements M" header, vertex lines "x y tag",
// element lines "i j k".  Coordinates are printed with 17 significant digits so
// a write/read cycle reproduces them bit-exactly; midpoints are rebuilt on read
// as endpoint averages (re-snap Body edges if the disk is known).
void write_mesh_text(const Mesh2D& mesh, const std::string& path);
Mesh2D read_mesh_text(const std::string& path);

}  // namespace fsi
