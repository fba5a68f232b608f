#include "placegen/primitives.hpp"

#include <cmath>

#include "placegen/error.hpp"

namespace placegen {
namespace primitives {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint32_t push(TriMesh& m, const Vec3& v) {
    m.vertices.push_back(v);
    return static_cast<std::uint32_t>(m.vertices.size() - 1);
}

void quad(TriMesh& m, std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    m.triangles.push_back({a, b, c});
    m.triangles.push_back({a, c, d});
}
} // namespace

TriMesh box(double sx, double sy, double sz, double density, const Vec3& center) {
    TriMesh m;
    const Vec3 h(sx / 2, sy / 2, sz / 2);
    for (int i = 0; i < 8; ++i)
        push(m, center + Vec3((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                              (i & 4) ? h.z() : -h.z()));
    quad(m, 0, 2, 3, 1); // bottom (-z)
    quad(m, 4, 5, 7, 6); // top (+z)
    quad(m, 0, 1, 5, 4); // -y
    quad(m, 2, 6, 7, 3); // +y
    quad(m, 0, 4, 6, 2); // -x
    quad(m, 1, 3, 7, 5); // +x
    m.finalize(density);
    return m;
}

TriMesh lathe(const std::vector<std::pair<double, double>>& profile, int segments,
              double density) {
    if (profile.size() < 3) throw Error("lathe: profile needs at least 3 points");
    if (segments < 3) throw Error("lathe: segments must be >= 3");

    TriMesh m;
    // Ring (or pole) vertex ids per profile point.
    std::vector<std::vector<std::uint32_t>> rings(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const auto [r, z] = profile[i];
        if (r <= 1e-12) {
            rings[i].push_back(push(m, Vec3(0, 0, z)));
        } else {
            for (int k = 0; k < segments; ++k) {
                const double a = kTwoPi * k / segments;
                rings[i].push_back(push(m, Vec3(r * std::cos(a), r * std::sin(a), z)));
            }
        }
    }

    for (std::size_t i = 0; i < profile.size(); ++i) {
        const std::size_t j = (i + 1) % profile.size();
        const double r1 = profile[i].first, r2 = profile[j].first;
        if (r1 <= 1e-12 && r2 <= 1e-12) continue; // axis segment, no surface
        for (int k = 0; k < segments; ++k) {
            const int kn = (k + 1) % segments;
            if (r1 <= 1e-12) {
                m.triangles.push_back({rings[i][0], rings[j][k], rings[j][kn]});
            } else if (r2 <= 1e-12) {
                m.triangles.push_back({rings[i][k], rings[j][0], rings[i][kn]});
            } else {
                quad(m, rings[i][k], rings[j][k], rings[j][kn], rings[i][kn]);
            }
        }
    }
    m.finalize(density);
    return m;
}

TriMesh cylinder(double radius, double height, int segments, double density,
                 const Vec3& center) {
    TriMesh m = lathe({{0.0, -height / 2}, {radius, -height / 2}, {radius, height / 2}, {0.0, height / 2}},
                      segments, density);
    if (!center.isZero()) {
        for (Vec3& v : m.vertices) v += center;
        m.finalize(density);
    }
    return m;
}

TriMesh uv_sphere(double radius, int segments, int rings, double density) {
    std::vector<std::pair<double, double>> profile;
    for (int i = 0; i <= rings; ++i) {
        const double t = 3.14159265358979323846 * i / rings; // 0 at -z pole
        profile.emplace_back(radius * std::sin(t), -radius * std::cos(t));
    }
    return lathe(profile, segments, density);
}

TriMesh torus(double major_radius, double minor_radius, int major_segments,
              int minor_segments, double density) {
    TriMesh m;
    for (int i = 0; i < major_segments; ++i) {
        const double u = kTwoPi * i / major_segments;
        for (int j = 0; j < minor_segments; ++j) {
            const double v = kTwoPi * j / minor_segments;
            const double rr = major_radius + minor_radius * std::cos(v);
            push(m, Vec3(rr * std::cos(u), rr * std::sin(u), minor_radius * std::sin(v)));
        }
    }
    auto id = [&](int i, int j) {
        return static_cast<std::uint32_t>((i % major_segments) * minor_segments +
                                          (j % minor_segments));
    };
    for (int i = 0; i < major_segments; ++i)
        for (int j = 0; j < minor_segments; ++j)
            quad(m, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
    m.finalize(density);
    return m;
}

TriMesh slotted_block(double sx, double sy, double sz, double hole_radius,
                      double hole_depth, int segments, double density) {
    if (segments % 8 != 0) throw Error("slotted_block: segments must be a multiple of 8");
    if (hole_radius >= std::min(sx, sy) / 2)
        throw Error("slotted_block: hole does not fit");
    if (hole_depth >= sz) throw Error("slotted_block: hole too deep");

    TriMesh m;
    const double hx = sx / 2, hy = sy / 2;
    const double z0 = 0.0, z1 = sz, zh = sz - hole_depth;

    // Square-perimeter point at ring angle a (ray from the center).
    auto square_pt = [&](double a) {
        const double c = std::cos(a), s = std::sin(a);
        const double t = 1.0 / std::max(std::abs(c) / hx, std::abs(s) / hy);
        return Vec3(t * c, t * s, 0.0);
    };

    std::vector<std::uint32_t> bot(segments), top(segments), circ_top(segments), circ_bot(segments);
    for (int k = 0; k < segments; ++k) {
        const double a = kTwoPi * k / segments;
        const Vec3 sq = square_pt(a);
        bot[k] = push(m, Vec3(sq.x(), sq.y(), z0));
        top[k] = push(m, Vec3(sq.x(), sq.y(), z1));
        circ_top[k] = push(m, Vec3(hole_radius * std::cos(a), hole_radius * std::sin(a), z1));
        circ_bot[k] = push(m, Vec3(hole_radius * std::cos(a), hole_radius * std::sin(a), zh));
    }
    const std::uint32_t bot_center = push(m, Vec3(0, 0, z0));
    const std::uint32_t hole_center = push(m, Vec3(0, 0, zh));

    for (int k = 0; k < segments; ++k) {
        const int kn = (k + 1) % segments;
        quad(m, bot[k], bot[kn], top[kn], top[k]);               // outer wall
        quad(m, top[k], top[kn], circ_top[kn], circ_top[k]);     // top ring
        quad(m, circ_top[k], circ_top[kn], circ_bot[kn], circ_bot[k]); // hole wall
        m.triangles.push_back({circ_bot[k], circ_bot[kn], hole_center}); // hole bottom
        m.triangles.push_back({bot[kn], bot[k], bot_center});    // outer bottom
    }
    m.finalize(density);
    return m;
}

TriMesh bowl(double base_radius_outer, double top_radius_outer, double height,
             double thickness, int segments, double density) {
    const double rbi = std::max(base_radius_outer - thickness, thickness / 2);
    const double rti = top_radius_outer - thickness;
    return lathe({{0.0, 0.0},
                  {base_radius_outer, 0.0},
                  {top_radius_outer, height},
                  {rti, height},
                  {rbi, thickness},
                  {0.0, thickness}},
                 segments, density);
}

} // namespace primitives
} // namespace placegen
