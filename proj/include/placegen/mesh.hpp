#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "placegen/pose.hpp"

namespace placegen {

struct Aabb {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::max());
    Vec3 hi = Vec3::Constant(std::numeric_limits<double>::lowest());

    void expand(const Vec3& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    Vec3 extents() const { return hi - lo; }
    Vec3 center() const { return 0.5 * (lo + hi); }
    double diagonal() const { return (hi - lo).norm(); }
    bool contains(const Vec3& p) const {
        return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
    }
};

/// Indexed triangle mesh with uniform-density mass properties.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::vector<double> tri_area;    // m^2
    std::vector<Vec3> tri_normal;    // unit outward normals
    double total_area = 0.0;
    Aabb bbox;
    double volume = 0.0;             // m^3, signed-tet sum (>=0 after finalize)
    double mass = 0.0;               // kg
    Vec3 com = Vec3::Zero();
    Mat3 inertia = Mat3::Zero();     // about com, mesh frame
    bool watertight = false;
    int degenerate_dropped = 0;      // triangles removed during cleanup

    Vec3 tri_vertex(std::size_t t, int corner) const {
        return vertices[triangles[t][corner]];
    }
    Vec3 tri_centroid(std::size_t t) const {
        return (tri_vertex(t, 0) + tri_vertex(t, 1) + tri_vertex(t, 2)) / 3.0;
    }

    /// Drops degenerate triangles, orients outward (positive volume), fills
    /// areas/normals/bbox/mass properties and the watertight flag.
    void finalize(double density);
};

/// On-surface point set with outward normals, in the mesh frame.
struct SurfaceSamples {
    std::vector<Vec3> points;
    std::vector<Vec3> normals;
    std::vector<std::uint32_t> triangle; // source triangle per sample
};

TriMesh load_mesh(const std::string& path, double scale, double density);

void write_stl_binary(const TriMesh& mesh, const std::string& path);
void write_obj(const TriMesh& mesh, const std::string& path);

struct PrincipalAxes {
    Mat3 axes = Mat3::Identity(); // columns, descending surface variance
    bool degenerate_fallback = false;
};

/// PCA of the area-weighted surface measure (exact triangle integrals).
/// Columns are orthonormal, right-handed, each flipped so its
/// largest-magnitude component is positive. Near-isotropic or rank-deficient
/// covariance falls back to bbox axes sorted by extent.
PrincipalAxes principal_axes(const TriMesh& mesh);

/// Area-weighted uniform surface sampling, deterministic per seed.
SurfaceSamples sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed);

} // namespace placegen
