#include "fsi/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "delaunay.hpp"
#include "fsi/errors.hpp"

namespace fsi {

double twice_area(const Vec2& a, const Vec2& b, const Vec2& c) {
  return cross2(b - a, c - a);
}

double triangle_min_angle(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double la = (c - b).norm(), lb = (a - c).norm(), lc = (b - a).norm();
  auto angle = [](double opp, double s1, double s2) {
    double cosv = (s1 * s1 + s2 * s2 - opp * opp) / (2.0 * s1 * s2);
    cosv = std::clamp(cosv, -1.0, 1.0);
    return std::acos(cosv);
  };
  return std::min({angle(la, lb, lc), angle(lb, lc, la), angle(lc, la, lb)});
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

namespace {

constexpr double kPi = std::numbers::pi;

// Deterministic per-index jitter in [-1, 1): splitmix64 hashed.
double hash_unit(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  x = x ^ (x >> 31);
  return 2.0 * (static_cast<double>(x >> 11) * 0x1.0p-53) - 1.0;
}

void orient_ccw(Mesh2D& mesh) {
  for (auto& tri : mesh.triangles) {
    if (twice_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]) < 0.0)
      std::swap(tri[1], tri[2]);
  }
}

}  // namespace

void build_edges(Mesh2D& mesh) {
  const int nt = mesh.num_triangles();
  std::map<std::pair<int, int>, int> edge_id;
  for (const auto& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      auto key = std::minmax(a, b);
      edge_id.emplace(std::pair<int, int>(key.first, key.second), 0);
    }
  }
  int id = 0;
  for (auto& [key, value] : edge_id) {
    (void)key;
    value = id++;
  }

  const int ne = id;
  mesh.edges.assign(ne, {0, 0});
  mesh.edge_midpoints.assign(ne, Vec2::Zero());
  mesh.edge_tag.assign(ne, BoundaryTag::Interior);
  mesh.tri_edges.assign(nt, {0, 0, 0});

  std::vector<int> adjacent(ne, 0);
  for (int t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      const int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      auto key = std::minmax(a, b);
      const int e = edge_id[{key.first, key.second}];
      mesh.tri_edges[t][k] = e;
      mesh.edges[e] = {key.first, key.second};
      adjacent[e] += 1;
    }
  }

  for (int e = 0; e < ne; ++e) {
    const auto [a, b] = mesh.edges[e];
    mesh.edge_midpoints[e] = 0.5 * (mesh.vertices[a] + mesh.vertices[b]);
    if (adjacent[e] == 1) {
      if (mesh.vertex_tag[a] == BoundaryTag::Interior ||
          mesh.vertex_tag[a] != mesh.vertex_tag[b])
        throw MeshQualityFailure("boundary edge with inconsistent vertex tags");
      mesh.edge_tag[e] = mesh.vertex_tag[a];
    } else if (adjacent[e] != 2) {
      throw MeshQualityFailure("non-manifold edge");
    }
  }
}

Mesh2D generate_mesh(const Geometry& geom) {
  const Box& box = geom.box;
  const Vec2 c = geom.disk_center;
  const double r = geom.disk_radius;
  const double h = geom.target_h;
  if (r <= 0.0 || h <= 0.0 || box.width() <= 0.0 || box.height() <= 0.0)
    throw GeometryInfeasible("non-positive radius, mesh size, or box extent");

  const double gap = std::min({c.x() - r - box.lo.x(), box.hi.x() - r - c.x(),
                               c.y() - r - box.lo.y(), box.hi.y() - r - c.y()});
  if (gap <= 0.0) throw GeometryInfeasible("disk does not fit inside the box");
  if (gap < 2.0 * h)
    throw GeometryInfeasible("clearance between disk and wall below two element layers");

  const int n_body = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * r / h)));

  // Concentric node rings, graded outward, doubling the angular count when
  // the circumferential spacing outgrows the target size.
  struct Ring {
    double radius;
    int count;
    int start;
  };
  std::vector<Ring> rings;
  std::vector<Vec2> verts;
  std::vector<BoundaryTag> tags;

  auto push_ring = [&](double radius, int count) {
    rings.push_back({radius, count, static_cast<int>(verts.size())});
    for (int j = 0; j < count; ++j) {
      const double ang = 2.0 * kPi * j / count;
      verts.push_back(c + radius * Vec2(std::cos(ang), std::sin(ang)));
      tags.push_back(rings.size() == 1 ? BoundaryTag::Body : BoundaryTag::Interior);
    }
  };

  const double r_out = r + std::min(2.5 * h, 0.5 * gap);
  double radius = r;
  int count = n_body;
  push_ring(radius, count);
  while (true) {
    const double circ = 2.0 * kPi * radius / count;
    const double dr = std::clamp(0.8 * circ, 0.55 * h, h);
    if (radius + dr > r_out) break;
    radius += dr;
    if (2.0 * kPi * radius / count > 1.45 * h) count *= 2;
    push_ring(radius, count);
  }

  std::vector<std::array<int, 3>> tris;
  for (size_t l = 0; l + 1 < rings.size(); ++l) {
    const Ring& in = rings[l];
    const Ring& out = rings[l + 1];
    if (in.count == out.count) {
      const int n = in.count;
      for (int j = 0; j < n; ++j) {
        const int a0 = in.start + j, a1 = in.start + (j + 1) % n;
        const int b0 = out.start + j, b1 = out.start + (j + 1) % n;
        if (j % 2 == 0) {
          tris.push_back({a0, a1, b1});
          tris.push_back({a0, b1, b0});
        } else {
          tris.push_back({a0, a1, b0});
          tris.push_back({a1, b1, b0});
        }
      }
    } else {
      const int n = in.count;
      for (int j = 0; j < n; ++j) {
        const int a0 = in.start + j, a1 = in.start + (j + 1) % n;
        const int b0 = out.start + 2 * j;
        const int b1 = out.start + 2 * j + 1;
        const int b2 = out.start + (2 * j + 2) % out.count;
        tris.push_back({a0, b0, b1});
        tris.push_back({a0, b1, a1});
        tris.push_back({a1, b1, b2});
      }
    }
  }

  // Background grid: jittered interior lattice plus exact boundary nodes.
  const int nx = std::max(2, static_cast<int>(std::lround(box.width() / h)));
  const int ny = std::max(2, static_cast<int>(std::lround(box.height() / h)));
  const double gx = box.width() / nx, gy = box.height() / ny;
  const Ring& outer = rings.back();
  const double outer_spacing = 2.0 * kPi * outer.radius / outer.count;
  const double cull = outer.radius + 0.55 * std::max({gx, gy, outer_spacing});

  std::vector<int> stitch;  // global vertex ids taking part in the Delaunay stitch
  for (int j = 0; j < outer.count; ++j) stitch.push_back(outer.start + j);

  const double amp = 0.12 * std::min(gx, gy);
  for (int iy = 1; iy < ny; ++iy) {
    for (int ix = 1; ix < nx; ++ix) {
      const std::uint64_t key = static_cast<std::uint64_t>(iy) * 100003ULL + ix;
      Vec2 p(box.lo.x() + ix * gx + amp * hash_unit(2 * key),
             box.lo.y() + iy * gy + amp * hash_unit(2 * key + 1));
      if ((p - c).norm() < cull) continue;
      stitch.push_back(static_cast<int>(verts.size()));
      verts.push_back(p);
      tags.push_back(BoundaryTag::Interior);
    }
  }
  auto push_wall = [&](const Vec2& p) {
    stitch.push_back(static_cast<int>(verts.size()));
    verts.push_back(p);
    tags.push_back(BoundaryTag::Wall);
  };
  for (int ix = 0; ix <= nx; ++ix) {
    push_wall(Vec2(box.lo.x() + ix * gx, box.lo.y()));
    push_wall(Vec2(box.lo.x() + ix * gx, box.hi.y()));
  }
  for (int iy = 1; iy < ny; ++iy) {
    push_wall(Vec2(box.lo.x(), box.lo.y() + iy * gy));
    push_wall(Vec2(box.hi.x(), box.lo.y() + iy * gy));
  }

  // Delaunay over the stitch points with a helper vertex at the disk center:
  // the helper fans the ring interior so no cocircular ring tie arises, and
  // every triangle using it is exactly the hole cover, dropped afterwards.
  std::vector<Vec2> dpoints;
  dpoints.push_back(c);
  for (int gid : stitch) dpoints.push_back(verts[gid]);
  const auto dtris = detail::delaunay(dpoints);
  for (const auto& t : dtris) {
    if (t[0] == 0 || t[1] == 0 || t[2] == 0) continue;  // hole fan
    tris.push_back({stitch[t[0] - 1], stitch[t[1] - 1], stitch[t[2] - 1]});
  }

  Mesh2D mesh;
  mesh.vertices = std::move(verts);
  mesh.triangles = std::move(tris);
  mesh.vertex_tag = std::move(tags);
  orient_ccw(mesh);

  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const double a = mesh.signed_area(t);
    if (a <= 0.0) throw MeshQualityFailure("degenerate triangle in generated mesh");
  }
  build_edges(mesh);
  Mesh2D snapped = snap_disk_boundary(mesh, c, r);

  const double worst = min_angle_deg(snapped);
  if (worst < 20.0) {
    std::ostringstream os;
    os << "minimum angle " << worst << " deg below 20 deg";
    throw MeshQualityFailure(os.str());
  }
  const double mean = mean_edge_length(snapped);
  if (std::abs(mean - h) > 0.25 * h)
    throw MeshQualityFailure("mean edge length deviates more than 25% from target");
  return snapped;
}

Mesh2D generate_box_mesh(const Box& box, int nx, int ny) {
  if (nx < 1 || ny < 1) throw GeometryInfeasible("box mesh needs positive subdivisions");
  Mesh2D mesh;
  const double gx = box.width() / nx, gy = box.height() / ny;
  for (int iy = 0; iy <= ny; ++iy) {
    for (int ix = 0; ix <= nx; ++ix) {
      mesh.vertices.emplace_back(box.lo.x() + ix * gx, box.lo.y() + iy * gy);
      const bool bdry = ix == 0 || ix == nx || iy == 0 || iy == ny;
      mesh.vertex_tag.push_back(bdry ? BoundaryTag::Wall : BoundaryTag::Interior);
    }
  }
  auto vid = [&](int ix, int iy) { return iy * (nx + 1) + ix; };
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      mesh.triangles.push_back({vid(ix, iy), vid(ix + 1, iy), vid(ix + 1, iy + 1)});
      mesh.triangles.push_back({vid(ix, iy), vid(ix + 1, iy + 1), vid(ix, iy + 1)});
    }
  }
  build_edges(mesh);
  return mesh;
}

Mesh2D move_nodes(const Mesh2D& mesh, const std::vector<Vec2>& displacement) {
  if (static_cast<int>(displacement.size()) != mesh.num_nodes())
    throw SimError("move_nodes: displacement size mismatch");
  Mesh2D out = mesh;
  for (int i = 0; i < mesh.num_vertices(); ++i) out.vertices[i] += displacement[i];
  for (int e = 0; e < mesh.num_edges(); ++e)
    out.edge_midpoints[e] += displacement[mesh.num_vertices() + e];

  int worst_tri = -1;
  double worst_area = 0.0;
  for (int t = 0; t < out.num_triangles(); ++t) {
    const double a = out.signed_area(t);
    if (a <= 0.0 && (worst_tri < 0 || a < worst_area)) {
      worst_tri = t;
      worst_area = a;
    }
  }
  if (worst_tri >= 0) {
    std::ostringstream os;
    os << "element " << worst_tri << " inverted, signed area " << worst_area;
    throw ElementInversion(os.str(), worst_tri, worst_area);
  }
  return out;
}

Mesh2D snap_disk_boundary(const Mesh2D& mesh, const Vec2& center, double radius) {
  Mesh2D out = mesh;
  auto project = [&](Vec2& p) {
    const Vec2 d = p - center;
    const double len = d.norm();
    if (std::abs(len - radius) > 0.2 * radius)
      throw SnapTooLarge("node too far from the disk circle to snap");
    p = center + (radius / len) * d;
  };
  for (int i = 0; i < mesh.num_vertices(); ++i)
    if (mesh.vertex_tag[i] == BoundaryTag::Body) project(out.vertices[i]);
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (mesh.edge_tag[e] == BoundaryTag::Body) project(out.edge_midpoints[e]);
  return out;
}

double min_gap(const Mesh2D& mesh) {
  double best = std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.edge_tag[e] != BoundaryTag::Wall) continue;
    const Vec2& a = mesh.vertices[mesh.edges[e][0]];
    const Vec2& b = mesh.vertices[mesh.edges[e][1]];
    for (int i = 0; i < mesh.num_vertices(); ++i) {
      if (mesh.vertex_tag[i] != BoundaryTag::Body) continue;
      best = std::min(best, point_segment_distance(mesh.vertices[i], a, b));
    }
  }
  return best;
}

double total_area(const Mesh2D& mesh) {
  double sum = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) sum += mesh.signed_area(t);
  return sum;
}

double min_angle_deg(const Mesh2D& mesh) {
  double worst = 180.0;
  for (const auto& tri : mesh.triangles) {
    worst = std::min(worst, triangle_min_angle(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                               mesh.vertices[tri[2]]) *
                                180.0 / kPi);
  }
  return worst;
}

double mean_edge_length(const Mesh2D& mesh) {
  double sum = 0.0;
  for (const auto& e : mesh.edges) sum += (mesh.vertices[e[0]] - mesh.vertices[e[1]]).norm();
  return sum / mesh.num_edges();
}

void write_mesh_text(const Mesh2D& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "nodes " << mesh.num_vertices() << " elements " << mesh.num_triangles() << "\n";
  char buf[80];
  for (int i = 0; i < mesh.num_vertices(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %d", mesh.vertices[i].x(),
                  mesh.vertices[i].y(), static_cast<int>(mesh.vertex_tag[i]));
    out << buf << "\n";
  }
  for (const auto& tri : mesh.triangles)
    out << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
  if (!out) throw IoError("write failed: " + path);
}

Mesh2D read_mesh_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string word;
  int nv = 0, nt = 0;
  if (!(in >> word >> nv) || word != "nodes") throw IoError("bad mesh header: " + path);
  if (!(in >> word >> nt) || word != "elements") throw IoError("bad mesh header: " + path);
  Mesh2D mesh;
  mesh.vertices.resize(nv);
  mesh.vertex_tag.resize(nv);
  for (int i = 0; i < nv; ++i) {
    double x, y;
    int tag;
    if (!(in >> x >> y >> tag)) throw IoError("truncated node list: " + path);
    mesh.vertices[i] = Vec2(x, y);
    if (tag < 0 || tag > 2) throw IoError("invalid node tag: " + path);
    mesh.vertex_tag[i] = static_cast<BoundaryTag>(tag);
  }
  mesh.triangles.resize(nt);
  for (int t = 0; t < nt; ++t) {
    auto& tri = mesh.triangles[t];
    if (!(in >> tri[0] >> tri[1] >> tri[2])) throw IoError("truncated element list: " + path);
    for (int v : tri)
      if (v < 0 || v >= nv) throw IoError("element index out of range: " + path);
  }
  build_edges(mesh);
  return mesh;
}

}  // namespace fsi
