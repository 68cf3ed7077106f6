#include "delaunay.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "fsi/errors.hpp"

namespace fsi::detail {
namespace {

long double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
  const long double abx = static_cast<long double>(b.x()) - a.x();
  const long double aby = static_cast<long double>(b.y()) - a.y();
  const long double acx = static_cast<long double>(c.x()) - a.x();
  const long double acy = static_cast<long double>(c.y()) - a.y();
  return abx * acy - aby * acx;
}

// > 0 when d lies strictly inside the circumcircle of the CCW triangle abc.
long double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const long double adx = static_cast<long double>(a.x()) - d.x();
  const long double ady = static_cast<long double>(a.y()) - d.y();
  const long double bdx = static_cast<long double>(b.x()) - d.x();
  const long double bdy = static_cast<long double>(b.y()) - d.y();
  const long double cdx = static_cast<long double>(c.x()) - d.x();
  const long double cdy = static_cast<long double>(c.y()) - d.y();
  const long double ad2 = adx * adx + ady * ady;
  const long double bd2 = bdx * bdx + bdy * bdy;
  const long double cd2 = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd2 - bd2 * cdy) - ady * (bdx * cd2 - bd2 * cdx) +
         ad2 * (bdx * cdy - bdy * cdx);
}

struct Tri {
  std::array<int, 3> v;
  bool alive = true;
};

}  // namespace

std::vector<std::array<int, 3>> delaunay(const std::vector<Vec2>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 3) throw MeshQualityFailure("delaunay: fewer than 3 points");

  std::vector<Vec2> pts = points;
  Vec2 lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec2 mid = 0.5 * (lo + hi);
  const double span = std::max({hi.x() - lo.x(), hi.y() - lo.y(), 1e-12});
  const double big = 64.0 * span;
  pts.push_back(mid + Vec2(-big, -0.6 * big));
  pts.push_back(mid + Vec2(big, -0.6 * big));
  pts.push_back(mid + Vec2(0.0, big));

  std::vector<Tri> tris;
  tris.push_back({{n, n + 1, n + 2}, true});

  std::vector<int> bad;
  // Key is the undirected edge; value counts occurrences and keeps the CCW
  // direction from the owning bad triangle.
  std::map<std::pair<int, int>, std::array<int, 3>> cavity;

  for (int p = 0; p < n; ++p) {
    bad.clear();
    cavity.clear();
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      if (!tris[t].alive) continue;
      const auto& v = tris[t].v;
      if (incircle(pts[v[0]], pts[v[1]], pts[v[2]], pts[p]) > 0.0L) bad.push_back(t);
    }
    if (bad.empty()) throw MeshQualityFailure("delaunay: point outside triangulation");

    for (int t : bad) {
      tris[t].alive = false;
      const auto& v = tris[t].v;
      for (int k = 0; k < 3; ++k) {
        const int a = v[k], b = v[(k + 1) % 3];
        auto key = std::minmax(a, b);
        auto& e = cavity[{key.first, key.second}];
        e[0] += 1;
        e[1] = a;
        e[2] = b;
      }
    }
    for (const auto& [key, e] : cavity) {
      (void)key;
      if (e[0] == 1) {
        if (orient(pts[p], pts[e[1]], pts[e[2]]) <= 0.0L)
          throw MeshQualityFailure("delaunay: degenerate cavity");
        tris.push_back({{p, e[1], e[2]}, true});
      } else if (e[0] > 2) {
        throw MeshQualityFailure("delaunay: non-manifold cavity");
      }
    }
  }

  std::vector<std::array<int, 3>> out;
  for (const auto& t : tris) {
    if (!t.alive) continue;
    if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
    out.push_back(t.v);
  }
  return out;
}

}  // namespace fsi::detail
