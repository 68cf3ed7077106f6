#pragma once

#include <vector>

#include "fsi/fem.hpp"
#include "fsi/mesh.hpp"

namespace fsi {

// Nodal values at the quadratic nodes (vertices then edge midpoints).
using ExtensionField = std::vector<Vec2>;
using CutoffField = std::vector<double>;

enum class ExtensionKind { Harmonic, Stokes };

// Lifts the rigid velocity data v + omega x (x - q) from the disk boundary
// into the fluid domain, zero on the walls.  Componentwise harmonic by
// default; the Stokes variant reuses the saddle-point solver and returns its
// velocity.
ExtensionField harmonic_extension(const Mesh2D& mesh, const Vec2& q, const Vec2& v,
                                  double omega,
                                  ExtensionKind kind = ExtensionKind::Harmonic);

// Harmonic scalar field equal to 1 on the disk boundary and 0 on the walls.
CutoffField cutoff_field(const Mesh2D& mesh);

// Gradient of a scalar nodal field inside element t at barycentric (l1, l2).
Vec2 scalar_gradient(const Mesh2D& mesh, const CutoffField& field, int t, double l1,
                     double l2);

double eval_scalar_at(const Mesh2D& mesh, const CutoffField& field, const Vec2& x);

}  // namespace fsi
