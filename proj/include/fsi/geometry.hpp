#pragma once

#include <Eigen/Dense>

namespace fsi {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

// Scalar cross product in 2D: a x b = a1*b2 - a2*b1.
inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Angular velocity w applied to a lever arm y: w x y = w * (-y2, y1).
inline Vec2 omega_cross(double w, const Vec2& y) { return Vec2(-w * y.y(), w * y.x()); }

// Rigid velocity field v + w x (x - q) evaluated at x.
inline Vec2 rigid_velocity(const Vec2& v, double w, const Vec2& q, const Vec2& x) {
  return v + omega_cross(w, x - q);
}

struct Box {
  Vec2 lo{0.0, 0.0};
  Vec2 hi{1.0, 1.0};

  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
  double area() const { return width() * height(); }
};

// Rectangular container with a disk-shaped hole; target_h sets the element size.
struct Geometry {
  Box box;
  Vec2 disk_center{0.5, 0.505};
  double disk_radius = 0.1;
  double target_h = 6.284e-2;
};

double twice_area(const Vec2& a, const Vec2& b, const Vec2& c);
double triangle_min_angle(const Vec2& a, const Vec2& b, const Vec2& c);
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

}  // namespace fsi
