#pragma once

#include <vector>

#include "placegen/mesh.hpp"

namespace placegen {

/// Node-centered signed-distance grid. Negative strictly inside a watertight
/// mesh. Queries outside the grid return the border value plus the distance
/// to the grid box (always positive once padding exceeds the contact skin).
struct SdfGrid {
    Vec3 origin = Vec3::Zero(); // position of node (0,0,0)
    double cell = 0.0;
    int nx = 0, ny = 0, nz = 0; // node counts
    std::vector<double> values;
    std::vector<Vec3> gradients;
    double lipschitz = 2.0;     // bound on |grad| of the interpolated field

    std::size_t node_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
    Aabb grid_box() const {
        Aabb b;
        b.expand(origin);
        b.expand(origin + cell * Vec3(nx - 1, ny - 1, nz - 1));
        return b;
    }

    double value(const Vec3& p) const;
    Vec3 gradient(const Vec3& p) const;
};

/// Distance to mesh on a padded grid around the bbox; sign from the
/// generalized winding number. Requires a watertight input.
SdfGrid build_sdf(const TriMesh& mesh, double cell, double padding);

/// True iff any sample, transformed by pose, penetrates deeper than tol.
bool overlap(const SurfaceSamples& samples, const Pose& pose, const SdfGrid& sdf,
             double penetration_tol);

/// Exact point-triangle distance helpers (exposed for tests).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);
double winding_number(const TriMesh& mesh, const Vec3& p);

} // namespace placegen
