#include "placegen/space.hpp"

#include <algorithm>
#include <cmath>

#include "placegen/error.hpp"

namespace placegen {

namespace {
constexpr double kPi = 3.14159265358979323846;

double lerp01(double lo, double hi, double u) { return lo + (hi - lo) * u; }
} // namespace

std::vector<double> build_area_cdf(const TriMesh& mesh) {
    std::vector<double> cdf(mesh.triangles.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        acc += mesh.tri_area[i];
        cdf[i] = acc;
    }
    return cdf;
}

std::size_t pick_triangle(const std::vector<double>& area_cdf, double u) {
    const double target = u * area_cdf.back();
    const auto it = std::lower_bound(area_cdf.begin(), area_cdf.end(), target);
    return std::min(static_cast<std::size_t>(it - area_cdf.begin()), area_cdf.size() - 1);
}

void finalize_scenario(Scenario& sc) {
    sc.support_area_cdf = build_area_cdf(sc.support);
    sc.object_area_cdf = build_area_cdf(sc.object.mesh);
    if (!sc.archive_spec.valid() ||
        (sc.archive_spec.box_hi - sc.archive_spec.box_lo).norm() == 0.0) {
        const double inflate = sc.object.bbox_diagonal;
        sc.archive_spec.box_lo = sc.volume.lo - Vec3::Constant(inflate);
        sc.archive_spec.box_hi = sc.volume.hi + Vec3::Constant(inflate);
    }
    if (!sc.archive_spec.valid()) throw ConfigError("invalid archive spec");
    if (sc.sim.char_length <= 0.0) sc.sim.char_length = sc.object.bbox_diagonal;
}

Pose decode_naive(const Genome& genome, const Scenario& sc) {
    if (genome.space != SpaceTag::naive || genome.values.size() != 6)
        throw Error("decode_naive: genome is not a 6-gene naive genome");
    const auto& g = genome.values;
    Pose pose;
    for (int i = 0; i < 3; ++i)
        pose.position[i] = lerp01(sc.volume.lo[i], sc.volume.hi[i], (g[i] + 1.0) / 2.0);
    pose.orientation = quat_from_euler_xyz(g[3] * kPi, g[4] * kPi, g[5] * kPi);
    return pose;
}

Pose decode_contact(const Genome& genome, const Scenario& sc) {
    if (genome.space != SpaceTag::contact || genome.values.size() != 7)
        throw Error("decode_contact: genome is not a 7-gene contact genome");
    const auto& g = genome.values;

    const std::size_t tri = pick_triangle(sc.support_area_cdf, (g[0] + 1.0) / 2.0);
    const Vec3 a = sc.support.tri_vertex(tri, 0);
    const Vec3 b = sc.support.tri_vertex(tri, 1);
    const Vec3 c = sc.support.tri_vertex(tri, 2);

    // Folded square keeps the (u, v) box bijective onto the triangle.
    double u = (g[1] + 1.0) / 2.0;
    double v = (g[2] + 1.0) / 2.0;
    if (u + v > 1.0) {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    const Vec3 contact_point = a + u * (b - a) + v * (c - a);

    const Vec3 n = sc.support.tri_normal[tri];
    const Vec3 helper = (std::abs(n.x()) < 0.9) ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = n.cross(helper).normalized();
    const Vec3 e2 = n.cross(e1);
    const double polar = (g[3] + 1.0) / 2.0 * sc.contact.cone_half_angle;
    const double azimuth = g[4] * kPi;
    const Vec3 dir = std::cos(polar) * n +
                     std::sin(polar) * (std::cos(azimuth) * e1 + std::sin(azimuth) * e2);

    const double spin = g[5] * kPi;
    const double standoff =
        lerp01(sc.contact.standoff_min, sc.standoff_max(), (g[6] + 1.0) / 2.0);

    Pose pose;
    pose.position = contact_point + standoff * dir;
    pose.orientation = (Quat(Eigen::AngleAxisd(spin, dir)) *
                        Quat::FromTwoVectors(Vec3::UnitZ(), dir))
                           .normalized();
    return pose;
}

Pose decode(const Genome& genome, const Scenario& sc) {
    return genome.space == SpaceTag::naive ? decode_naive(genome, sc)
                                           : decode_contact(genome, sc);
}

} // namespace placegen
