#pragma once

#include "placegen/mesh.hpp"

namespace placegen {
namespace primitives {

TriMesh box(double sx, double sy, double sz, double density, const Vec3& center = Vec3::Zero());

/// Solid of revolution about +z from a closed (r, z) profile polyline.
/// Profile points with r == 0 become poles; consecutive on-axis points are skipped.
TriMesh lathe(const std::vector<std::pair<double, double>>& profile, int segments,
              double density);

TriMesh cylinder(double radius, double height, int segments, double density,
                 const Vec3& center = Vec3::Zero());

TriMesh uv_sphere(double radius, int segments, int rings, double density);

TriMesh torus(double major_radius, double minor_radius, int major_segments,
              int minor_segments, double density);

/// Box with a blind cylindrical hole centered on the top face.
/// segments must be a multiple of 8 so the square corners land on ring points.
TriMesh slotted_block(double sx, double sy, double sz, double hole_radius,
                      double hole_depth, int segments, double density);

/// Truncated-cone shell (bowl) with wall thickness, base at z = 0.
TriMesh bowl(double base_radius_outer, double top_radius_outer, double height,
             double thickness, int segments, double density);

} // namespace primitives
} // namespace placegen
