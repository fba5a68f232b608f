#include "placegen/sdf.hpp"

#include <cmath>
#include <thread>

#include "placegen/error.hpp"

namespace placegen {

namespace {
constexpr double kFourPi = 12.566370614359172953850573533118;
} // namespace

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Ericson, Real-Time Collision Detection, 5.1.5
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);

    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

double winding_number(const TriMesh& mesh, const Vec3& p) {
    // Van Oosterom & Strackee solid angles summed over all triangles.
    double omega = 0.0;
    for (const auto& t : mesh.triangles) {
        const Vec3 a = mesh.vertices[t[0]] - p;
        const Vec3 b = mesh.vertices[t[1]] - p;
        const Vec3 c = mesh.vertices[t[2]] - p;
        const double la = a.norm(), lb = b.norm(), lc = c.norm();
        const double det = a.dot(b.cross(c));
        const double denom = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
        omega += 2.0 * std::atan2(det, denom);
    }
    return omega / kFourPi;
}

SdfGrid build_sdf(const TriMesh& mesh, double cell, double padding) {
    if (!mesh.watertight)
        throw NotWatertight("build_sdf requires a watertight mesh");
    if (cell <= 0.0) throw Error("build_sdf: cell size must be positive");
    const double min_edge = mesh.bbox.extents().minCoeff();
    if (min_edge / cell < 4.0)
        throw ResolutionTooCoarse("fewer than 4 cells along the smallest bbox edge");

    SdfGrid g;
    g.cell = cell;
    g.origin = mesh.bbox.lo - Vec3::Constant(padding);
    const Vec3 ext = mesh.bbox.extents() + Vec3::Constant(2.0 * padding);
    g.nx = static_cast<int>(std::ceil(ext.x() / cell)) + 1;
    g.ny = static_cast<int>(std::ceil(ext.y() / cell)) + 1;
    g.nz = static_cast<int>(std::ceil(ext.z() / cell)) + 1;
    g.values.resize(static_cast<std::size_t>(g.nx) * g.ny * g.nz);

    auto fill_slabs = [&](int k0, int k1) {
        for (int k = k0; k < k1; ++k) {
            for (int j = 0; j < g.ny; ++j) {
                for (int i = 0; i < g.nx; ++i) {
                    const Vec3 p = g.origin + cell * Vec3(i, j, k);
                    double best = std::numeric_limits<double>::max();
                    for (const auto& t : mesh.triangles) {
                        const Vec3 q = closest_point_on_triangle(
                            p, mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
                        best = std::min(best, (p - q).squaredNorm());
                    }
                    double d = std::sqrt(best);
                    if (winding_number(mesh, p) > 0.5) d = -d;
                    g.values[g.node_index(i, j, k)] = d;
                }
            }
        }
    };

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int nthreads = static_cast<int>(std::min<unsigned>(hw, g.nz));
    std::vector<std::thread> workers;
    const int per = (g.nz + nthreads - 1) / nthreads;
    for (int w = 0; w < nthreads; ++w) {
        const int k0 = w * per, k1 = std::min(g.nz, k0 + per);
        if (k0 < k1) workers.emplace_back(fill_slabs, k0, k1);
    }
    for (auto& t : workers) t.join();

    // Central differences (one-sided at the borders) for gradient lookups.
    g.gradients.resize(g.values.size());
    auto v = [&](int i, int j, int k) { return g.values[g.node_index(i, j, k)]; };
    double max_slope = 1.0;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                if (i + 1 < g.nx)
                    max_slope = std::max(max_slope, std::abs(v(i + 1, j, k) - v(i, j, k)) / cell);
                if (j + 1 < g.ny)
                    max_slope = std::max(max_slope, std::abs(v(i, j + 1, k) - v(i, j, k)) / cell);
                if (k + 1 < g.nz)
                    max_slope = std::max(max_slope, std::abs(v(i, j, k + 1) - v(i, j, k)) / cell);
            }
    g.lipschitz = std::sqrt(3.0) * max_slope;
    for (int k = 0; k < g.nz; ++k) {
        for (int j = 0; j < g.ny; ++j) {
            for (int i = 0; i < g.nx; ++i) {
                Vec3 grad;
                grad.x() = (v(std::min(i + 1, g.nx - 1), j, k) - v(std::max(i - 1, 0), j, k)) /
                           (cell * (std::min(i + 1, g.nx - 1) - std::max(i - 1, 0)));
                grad.y() = (v(i, std::min(j + 1, g.ny - 1), k) - v(i, std::max(j - 1, 0), k)) /
                           (cell * (std::min(j + 1, g.ny - 1) - std::max(j - 1, 0)));
                grad.z() = (v(i, j, std::min(k + 1, g.nz - 1)) - v(i, j, std::max(k - 1, 0))) /
                           (cell * (std::min(k + 1, g.nz - 1) - std::max(k - 1, 0)));
                g.gradients[g.node_index(i, j, k)] = grad;
            }
        }
    }
    return g;
}

namespace {

struct TrilinearCell {
    int i, j, k;
    double fx, fy, fz;
    double clamp_dist;
};

TrilinearCell locate(const SdfGrid& g, const Vec3& p) {
    const Vec3 local = (p - g.origin) / g.cell;
    const Vec3 clamped(std::clamp(local.x(), 0.0, double(g.nx - 1)),
                       std::clamp(local.y(), 0.0, double(g.ny - 1)),
                       std::clamp(local.z(), 0.0, double(g.nz - 1)));
    TrilinearCell c;
    c.clamp_dist = (local - clamped).norm() * g.cell;
    c.i = std::min(static_cast<int>(clamped.x()), g.nx - 2);
    c.j = std::min(static_cast<int>(clamped.y()), g.ny - 2);
    c.k = std::min(static_cast<int>(clamped.z()), g.nz - 2);
    c.i = std::max(c.i, 0);
    c.j = std::max(c.j, 0);
    c.k = std::max(c.k, 0);
    c.fx = clamped.x() - c.i;
    c.fy = clamped.y() - c.j;
    c.fz = clamped.z() - c.k;
    return c;
}

template <typename T>
T trilerp(const SdfGrid& g, const std::vector<T>& field, const TrilinearCell& c) {
    auto at = [&](int di, int dj, int dk) -> const T& {
        return field[g.node_index(c.i + di, c.j + dj, c.k + dk)];
    };
    const T x00 = (1 - c.fx) * at(0, 0, 0) + c.fx * at(1, 0, 0);
    const T x10 = (1 - c.fx) * at(0, 1, 0) + c.fx * at(1, 1, 0);
    const T x01 = (1 - c.fx) * at(0, 0, 1) + c.fx * at(1, 0, 1);
    const T x11 = (1 - c.fx) * at(0, 1, 1) + c.fx * at(1, 1, 1);
    const T y0 = (1 - c.fy) * x00 + c.fy * x10;
    const T y1 = (1 - c.fy) * x01 + c.fy * x11;
    return (1 - c.fz) * y0 + c.fz * y1;
}

} // namespace

double SdfGrid::value(const Vec3& p) const {
    const TrilinearCell c = locate(*this, p);
    return trilerp(*this, values, c) + c.clamp_dist;
}

Vec3 SdfGrid::gradient(const Vec3& p) const {
    const TrilinearCell c = locate(*this, p);
    if (c.clamp_dist > 0.0) {
        // Outside the grid: point away from the box.
        const Vec3 center = grid_box().center();
        const Vec3 d = p - center;
        return d.normalized();
    }
    return trilerp(*this, gradients, c);
}

bool overlap(const SurfaceSamples& samples, const Pose& pose, const SdfGrid& sdf,
             double penetration_tol) {
    for (const Vec3& s : samples.points) {
        if (sdf.value(pose.apply(s)) < -penetration_tol) return true;
    }
    return false;
}

} // namespace placegen
