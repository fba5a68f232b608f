#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "placegen/error.hpp"
#include "placegen/primitives.hpp"
#include "placegen/sdf.hpp"

using namespace placegen;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("placegen_test_" + name);
}

} // namespace

TEST_CASE("pose compose/inverse/apply") {
    Rng rng(42);
    for (int i = 0; i < 200; ++i) {
        Pose p;
        p.position = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        p.orientation = uniform_quaternion(rng);
        const Vec3 x(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));

        const Vec3 round_trip = p.inverse().apply(p.apply(x));
        CHECK((round_trip - x).norm() < 1e-9);

        const Pose id = p.compose(p.inverse());
        CHECK(id.position.norm() < 1e-9);
        CHECK(geodesic_angle(id.orientation, Quat::Identity()) < 1e-9);

        Pose q, r;
        q.position = Vec3(rng.uniform(-1, 1), 0, 0);
        q.orientation = uniform_quaternion(rng);
        r.position = Vec3(0, rng.uniform(-1, 1), 0);
        r.orientation = uniform_quaternion(rng);
        const Vec3 a = p.compose(q).compose(r).apply(x);
        const Vec3 b = p.compose(q.compose(r)).apply(x);
        CHECK((a - b).norm() < 1e-9);
    }
}

TEST_CASE("euler xyz round trip") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        const Quat q = uniform_quaternion(rng);
        const Vec3 e = euler_xyz_from_quat(q);
        const Quat back = quat_from_euler_xyz(e.x(), e.y(), e.z());
        CHECK(geodesic_angle(q, back) < 1e-9);
    }
}

TEST_CASE("chordal mean and geodesic angle") {
    const Quat a(Eigen::AngleAxisd(0.1, Vec3::UnitZ()));
    const Quat b(Eigen::AngleAxisd(-0.1, Vec3::UnitZ()));
    const Quat mean = chordal_mean({a, b, a, b});
    CHECK(geodesic_angle(mean, Quat::Identity()) < 1e-12);
    CHECK(geodesic_angle(a, mean) == doctest::Approx(0.1).epsilon(1e-12));
    // sign alignment: -q is the same rotation
    const Quat c(-b.w(), -b.x(), -b.y(), -b.z());
    const Quat mean2 = chordal_mean({a, c});
    CHECK(geodesic_angle(mean2, Quat::Identity()) < 1e-12);
}

TEST_CASE("unit cube mass properties") {
    const TriMesh cube = primitives::box(1.0, 1.0, 1.0, 1000.0);
    CHECK(cube.mass == doctest::Approx(1000.0).epsilon(1e-9));
    CHECK(cube.com.norm() < 1e-12);
    const double expected = cube.mass / 6.0; // (1/6) m a^2
    for (int i = 0; i < 3; ++i)
        CHECK(cube.inertia(i, i) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(std::abs(cube.inertia(0, 1)) < 1e-9);
    CHECK(cube.watertight);
    CHECK(cube.total_area == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("stl round trip with scale") {
    const TriMesh cube = primitives::box(1.0, 1.0, 1.0, 1000.0);
    const auto path = temp_file("cube.stl");
    write_stl_binary(cube, path.string());

    const TriMesh loaded = load_mesh(path.string(), 1.0, 1000.0);
    CHECK(loaded.mass == doctest::Approx(1000.0).epsilon(1e-5));
    CHECK(loaded.watertight);
    CHECK(loaded.triangles.size() == 12);

    const TriMesh scaled = load_mesh(path.string(), 0.1, 1000.0);
    CHECK(scaled.mass == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(scaled.bbox.extents().x() == doctest::Approx(0.1).epsilon(1e-6));
    const double expected = scaled.mass * 0.1 * 0.1 / 6.0;
    CHECK(scaled.inertia(2, 2) == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("degenerate triangle dropped with warning count") {
    TriMesh m = primitives::box(1.0, 1.0, 1.0, 1000.0);
    const std::size_t before = m.triangles.size();
    const std::uint32_t v = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.push_back(Vec3(2, 2, 2));
    m.vertices.push_back(Vec3(2, 2, 2));
    m.triangles.push_back({v, v + 1, 0});
    m.finalize(1000.0);
    CHECK(m.triangles.size() == before);
    CHECK(m.degenerate_dropped == 1);
}

TEST_CASE("ascii stl and obj loaders") {
    const auto stl_path = temp_file("tri.stl");
    {
        std::ofstream out(stl_path);
        out << "solid t\n";
        auto facet = [&](double z) {
            out << "facet normal 0 0 1\nouter loop\n";
            out << "vertex 0 0 " << z << "\nvertex 1 0 " << z << "\nvertex 0 1 " << z << "\n";
            out << "endloop\nendfacet\n";
        };
        facet(0.0);
        facet(1.0);
        out << "endsolid t\n";
    }
    const TriMesh stl = load_mesh(stl_path.string(), 1.0, 1000.0);
    CHECK(stl.triangles.size() == 2);
    CHECK_FALSE(stl.watertight);

    const auto obj_path = temp_file("quadface.obj");
    {
        std::ofstream out(obj_path);
        out << "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n";
        out << "f 1 2 3 4\n"; // quads are rejected
    }
    CHECK_THROWS_AS(load_mesh(obj_path.string(), 1.0, 1000.0), ParseError);

    const auto obj_tri = temp_file("tri.obj");
    {
        std::ofstream out(obj_tri);
        out << "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1/1 2/2 3/3\n";
    }
    const TriMesh obj = load_mesh(obj_tri.string(), 1.0, 1000.0);
    CHECK(obj.triangles.size() == 1);

    const auto obj_bad = temp_file("bad.obj");
    {
        std::ofstream out(obj_bad);
        out << "v 0 0 0\nv 1 0 0\nf 1 2 7\n";
    }
    CHECK_THROWS_AS(load_mesh(obj_bad.string(), 1.0, 1000.0), ParseError);

    CHECK_THROWS_AS(load_mesh("/nonexistent/mesh.stl", 1.0, 1000.0), ParseError);
}

TEST_CASE("principal axes: elongated box picks +x") {
    const TriMesh box = primitives::box(2.0, 0.5, 0.5, 1000.0);
    const PrincipalAxes axes = principal_axes(box);
    CHECK_FALSE(axes.degenerate_fallback);
    CHECK(std::abs(axes.axes.col(0).dot(Vec3::UnitX())) > std::cos(1e-6));
    CHECK(axes.axes.col(0).x() > 0.0); // sign convention
    CHECK(axes.axes.determinant() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("principal axes: cylinder axis matches dense-sample covariance oracle") {
    const TriMesh cyl = primitives::cylinder(0.02, 0.2, 48, 1000.0);
    const PrincipalAxes axes = principal_axes(cyl);
    CHECK_FALSE(axes.degenerate_fallback);

    // oracle: brute-force covariance of dense uniform surface samples
    const SurfaceSamples dense = sample_surface(cyl, 200000, 99);
    Vec3 mean = Vec3::Zero();
    for (const Vec3& p : dense.points) mean += p;
    mean /= static_cast<double>(dense.points.size());
    Mat3 cov = Mat3::Zero();
    for (const Vec3& p : dense.points) cov += (p - mean) * (p - mean).transpose();
    Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
    const Vec3 oracle_axis = es.eigenvectors().col(2);

    const double cos_angle = std::abs(axes.axes.col(0).dot(oracle_axis));
    CHECK(cos_angle > std::cos(1.0 * 3.14159265358979 / 180.0));
    CHECK(std::abs(axes.axes.col(0).dot(Vec3::UnitZ())) > std::cos(1.0 * 3.14159265358979 / 180.0));
}

TEST_CASE("principal axes: sphere takes the degenerate fallback") {
    const TriMesh sphere = primitives::uv_sphere(0.05, 32, 16, 1000.0);
    const PrincipalAxes axes = principal_axes(sphere);
    CHECK(axes.degenerate_fallback);
    CHECK(axes.axes.determinant() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("principal axes: rotation equivariance") {
    const TriMesh box = primitives::box(0.3, 0.1, 0.05, 1000.0);
    const PrincipalAxes base = principal_axes(box);

    Rng rng(5);
    const Quat q = uniform_quaternion(rng);
    TriMesh rotated = box;
    for (Vec3& v : rotated.vertices) v = q * v;
    rotated.finalize(1000.0);
    const PrincipalAxes rot = principal_axes(rotated);

    const Mat3 expected = q.toRotationMatrix() * base.axes;
    for (int c = 0; c < 3; ++c) {
        const double cos_angle = std::abs(rot.axes.col(c).dot(expected.col(c)));
        CHECK(cos_angle > std::cos(1.0 * 3.14159265358979 / 180.0));
    }
}

TEST_CASE("sdf of unit cube") {
    const TriMesh cube = primitives::box(1.0, 1.0, 1.0, 1000.0);
    const SdfGrid sdf = build_sdf(cube, 0.05, 0.2);

    CHECK(sdf.value(Vec3::Zero()) == doctest::Approx(-0.5).epsilon(0.12));
    CHECK(sdf.value(Vec3(1.5, 0, 0)) == doctest::Approx(1.0).epsilon(0.06));

    // convex containment agreement away from the surface
    Rng rng(11);
    int checked = 0;
    for (int i = 0; i < 400 && checked < 100; ++i) {
        const Vec3 p(rng.uniform(-0.65, 0.65), rng.uniform(-0.65, 0.65),
                     rng.uniform(-0.65, 0.65));
        const double boundary_dist =
            0.5 - p.cwiseAbs().maxCoeff(); // >0 inside, <0 outside
        if (std::abs(boundary_dist) < 0.06) continue;
        ++checked;
        CHECK((sdf.value(p) < 0.0) == (boundary_dist > 0.0));
    }
    CHECK(checked == 100);

    // gradient points outward near the +x face
    const Vec3 g = sdf.gradient(Vec3(0.45, 0, 0));
    CHECK(g.normalized().dot(Vec3::UnitX()) > 0.9);
}

TEST_CASE("sdf rejects open and too-coarse meshes") {
    TriMesh open_quad;
    open_quad.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)};
    open_quad.triangles = {{0, 1, 2}, {0, 2, 3}};
    open_quad.finalize(1000.0);
    CHECK_FALSE(open_quad.watertight);
    CHECK_THROWS_AS(build_sdf(open_quad, 0.05, 0.1), NotWatertight);

    const TriMesh cube = primitives::box(1.0, 1.0, 1.0, 1000.0);
    CHECK_THROWS_AS(build_sdf(cube, 0.3, 0.1), ResolutionTooCoarse);
}

TEST_CASE("winding number inside/outside") {
    const TriMesh cube = primitives::box(1.0, 1.0, 1.0, 1000.0);
    CHECK(winding_number(cube, Vec3(0, 0, 0)) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(winding_number(cube, Vec3(2, 0, 0)) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("overlap query against a slab") {
    const TriMesh slab = primitives::box(0.4, 0.4, 0.04, 1000.0, Vec3(0, 0, -0.02));
    const SdfGrid sdf = build_sdf(slab, 0.004, 0.04);
    const TriMesh cube = primitives::box(0.06, 0.06, 0.06, 500.0);
    const SurfaceSamples samples = sample_surface(cube, 400, 3);
    const double tol = 1e-3;

    Pose separated;
    separated.position = Vec3(0, 0, 1.0);
    CHECK_FALSE(overlap(samples, separated, sdf, tol));

    Pose inside;
    inside.position = Vec3(0, 0, -0.02);
    CHECK(overlap(samples, inside, sdf, tol));

    Pose touching; // max penetration = tol/2
    touching.position = Vec3(0, 0, 0.03 - 0.5 * tol);
    CHECK_FALSE(overlap(samples, touching, sdf, tol));
}

TEST_CASE("surface sampling: determinism, face balance, on-surface") {
    const TriMesh cube = primitives::box(1.0, 1.0, 1.0, 1000.0);

    const SurfaceSamples a = sample_surface(cube, 1000, 17);
    const SurfaceSamples b = sample_surface(cube, 1000, 17);
    REQUIRE(a.points.size() == 1000);
    for (std::size_t i = 0; i < a.points.size(); ++i) CHECK(a.points[i] == b.points[i]);

    // counts per face: 1000/6 within 5 binomial sigmas
    std::array<int, 6> face_counts{};
    for (std::size_t i = 0; i < a.points.size(); ++i)
        face_counts[a.triangle[i] / 2] += 1; // box() emits 2 triangles per face
    const double expected = 1000.0 / 6.0;
    const double sigma = std::sqrt(1000.0 * (1.0 / 6.0) * (5.0 / 6.0));
    for (int f = 0; f < 6; ++f) CHECK(std::abs(face_counts[f] - expected) < 5.0 * sigma);

    // every point on its source triangle
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        const auto& tri = cube.triangles[a.triangle[i]];
        const Vec3 v0 = cube.vertices[tri[0]], v1 = cube.vertices[tri[1]],
                   v2 = cube.vertices[tri[2]];
        const Vec3 n = (v1 - v0).cross(v2 - v0).normalized();
        CHECK(std::abs(n.dot(a.points[i] - v0)) < 1e-9);
    }

    const SurfaceSamples single = sample_surface(cube, 1, 1);
    CHECK(single.points.size() == 1);
    CHECK(single.points[0].cwiseAbs().maxCoeff() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("surface sampling density chi-square") {
    const TriMesh mesh = primitives::cylinder(0.02, 0.2, 16, 1000.0);
    const std::size_t n = 100000;
    const SurfaceSamples s = sample_surface(mesh, n, 23);
    std::vector<double> observed(mesh.triangles.size(), 0.0);
    for (const std::uint32_t t : s.triangle) observed[t] += 1.0;

    double chi2 = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const double expected = n * mesh.tri_area[t] / mesh.total_area;
        chi2 += (observed[t] - expected) * (observed[t] - expected) / expected;
    }
    // p > 0.01 with df = triangles - 1: compare against the 0.99 quantile,
    // approximated by Wilson-Hilferty
    const double df = static_cast<double>(mesh.triangles.size() - 1);
    const double z = 2.3263478740408408; // N(0,1) 0.99 quantile
    const double crit = df * std::pow(1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df)), 3.0);
    CHECK(chi2 < crit);
}

TEST_CASE("primitive meshes are watertight") {
    CHECK(primitives::box(1, 1, 1, 1000).watertight);
    CHECK(primitives::cylinder(0.02, 0.1, 24, 1000).watertight);
    CHECK(primitives::uv_sphere(0.05, 24, 12, 1000).watertight);
    CHECK(primitives::torus(0.035, 0.007, 24, 12, 1000).watertight);
    CHECK(primitives::slotted_block(0.12, 0.12, 0.05, 0.02, 0.035, 24, 1000).watertight);
    CHECK(primitives::bowl(0.035, 0.06, 0.03, 0.005, 36, 1000).watertight);

    // sphere volume sanity: tessellation underestimates slightly
    const TriMesh sphere = primitives::uv_sphere(0.05, 48, 24, 1000.0);
    const double exact = 4.0 / 3.0 * 3.14159265358979 * std::pow(0.05, 3);
    CHECK(sphere.volume == doctest::Approx(exact).epsilon(0.02));
}
