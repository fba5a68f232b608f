#include "placegen/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "placegen/error.hpp"

namespace placegen {

namespace {

constexpr double kDegenerateArea = 1e-12;

struct VertexKey {
    float x, y, z;
    bool operator==(const VertexKey&) const = default;
};

struct VertexKeyHash {
    std::size_t operator()(const VertexKey& k) const {
        std::uint32_t a, b, c;
        std::memcpy(&a, &k.x, 4);
        std::memcpy(&b, &k.y, 4);
        std::memcpy(&c, &k.z, 4);
        std::uint64_t h = 1469598103934665603ULL;
        for (std::uint32_t v : {a, b, c}) {
            h ^= v;
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

// Welds exactly-equal float coordinates into an indexed mesh.
class Welder {
public:
    std::uint32_t add(float x, float y, float z, std::vector<Vec3>& verts) {
        VertexKey key{x, y, z};
        auto [it, inserted] = index_.try_emplace(key, static_cast<std::uint32_t>(verts.size()));
        if (inserted) verts.emplace_back(x, y, z);
        return it->second;
    }

private:
    std::unordered_map<VertexKey, std::uint32_t, VertexKeyHash> index_;
};

bool looks_binary_stl(const std::vector<char>& bytes) {
    if (bytes.size() < 84) return false;
    std::uint32_t n;
    std::memcpy(&n, bytes.data() + 80, 4);
    return bytes.size() == 84 + static_cast<std::size_t>(n) * 50;
}

TriMesh parse_stl_binary(const std::vector<char>& bytes) {
    std::uint32_t n;
    std::memcpy(&n, bytes.data() + 80, 4);
    TriMesh mesh;
    Welder welder;
    mesh.triangles.reserve(n);
    const char* p = bytes.data() + 84;
    for (std::uint32_t t = 0; t < n; ++t, p += 50) {
        float v[12];
        std::memcpy(v, p, 48); // normal (ignored) + 3 vertices
        std::array<std::uint32_t, 3> tri{};
        for (int c = 0; c < 3; ++c)
            tri[c] = welder.add(v[3 + 3 * c], v[4 + 3 * c], v[5 + 3 * c], mesh.vertices);
        mesh.triangles.push_back(tri);
    }
    return mesh;
}

TriMesh parse_stl_ascii(const std::vector<char>& bytes, const std::string& path) {
    std::istringstream in(std::string(bytes.data(), bytes.size()));
    TriMesh mesh;
    Welder welder;
    std::string tok;
    std::vector<std::array<float, 3>> facet;
    while (in >> tok) {
        if (tok == "vertex") {
            float x, y, z;
            if (!(in >> x >> y >> z))
                throw ParseError(path + ": malformed STL vertex record");
            facet.push_back({x, y, z});
        } else if (tok == "endfacet") {
            if (facet.size() != 3)
                throw ParseError(path + ": STL facet with " +
                                 std::to_string(facet.size()) + " vertices");
            std::array<std::uint32_t, 3> tri{};
            for (int c = 0; c < 3; ++c)
                tri[c] = welder.add(facet[c][0], facet[c][1], facet[c][2], mesh.vertices);
            mesh.triangles.push_back(tri);
            facet.clear();
        }
    }
    if (!facet.empty()) throw ParseError(path + ": unterminated STL facet");
    return mesh;
}

TriMesh parse_obj(const std::vector<char>& bytes, const std::string& path) {
    std::istringstream in(std::string(bytes.data(), bytes.size()));
    TriMesh mesh;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z))
                throw ParseError(path + ":" + std::to_string(lineno) + ": bad v record");
            mesh.vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<std::uint32_t> idx;
            std::string item;
            while (ls >> item) {
                // "i", "i/t", "i/t/n", "i//n" forms; only the vertex index is used
                const std::size_t slash = item.find('/');
                const std::string head = item.substr(0, slash);
                long v = 0;
                try {
                    v = std::stol(head);
                } catch (const std::exception&) {
                    throw ParseError(path + ":" + std::to_string(lineno) + ": bad face index '" + item + "'");
                }
                if (v < 1 || static_cast<std::size_t>(v) > mesh.vertices.size())
                    throw ParseError(path + ":" + std::to_string(lineno) +
                                     ": face index out of range (1-based expected)");
                idx.push_back(static_cast<std::uint32_t>(v - 1));
            }
            if (idx.size() != 3)
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 ": only triangulated faces are supported");
            mesh.triangles.push_back({idx[0], idx[1], idx[2]});
        }
    }
    return mesh;
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    std::string tail = s.substr(s.size() - suffix.size());
    std::transform(tail.begin(), tail.end(), tail.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return tail == suffix;
}

} // namespace

void TriMesh::finalize(double density) {
    // Drop degenerate triangles.
    std::vector<std::array<std::uint32_t, 3>> kept;
    kept.reserve(triangles.size());
    degenerate_dropped = 0;
    for (const auto& t : triangles) {
        const Vec3 a = vertices[t[0]], b = vertices[t[1]], c = vertices[t[2]];
        const double area = 0.5 * (b - a).cross(c - a).norm();
        if (area < kDegenerateArea) {
            ++degenerate_dropped;
            continue;
        }
        kept.push_back(t);
    }
    triangles = std::move(kept);
    if (triangles.empty()) throw EmptyMesh("mesh has no non-degenerate triangles");

    // Signed volume; flip winding if the surface is oriented inward.
    auto signed_volume = [&] {
        double v = 0.0;
        for (const auto& t : triangles)
            v += vertices[t[0]].dot(vertices[t[1]].cross(vertices[t[2]])) / 6.0;
        return v;
    };
    double vol = signed_volume();
    if (vol < 0.0) {
        for (auto& t : triangles) std::swap(t[1], t[2]);
        vol = -vol;
    }
    volume = vol;

    tri_area.resize(triangles.size());
    tri_normal.resize(triangles.size());
    total_area = 0.0;
    bbox = Aabb{};
    for (std::size_t i = 0; i < triangles.size(); ++i) {
        const auto& t = triangles[i];
        const Vec3 a = vertices[t[0]], b = vertices[t[1]], c = vertices[t[2]];
        const Vec3 n = (b - a).cross(c - a);
        tri_area[i] = 0.5 * n.norm();
        tri_normal[i] = n.normalized();
        total_area += tri_area[i];
    }
    for (const Vec3& v : vertices) bbox.expand(v);

    // Polyhedral mass properties (divergence theorem over origin tetrahedra).
    // Valid for closed, outward-oriented surfaces.
    double m = 0.0;
    Vec3 first = Vec3::Zero();
    double ixx = 0, iyy = 0, izz = 0, ixy = 0, iyz = 0, izx = 0;
    for (const auto& t : triangles) {
        const Vec3 a = vertices[t[0]], b = vertices[t[1]], c = vertices[t[2]];
        const double detj = a.dot(b.cross(c));
        m += detj / 6.0;
        first += detj / 24.0 * (a + b + c);
        auto sq = [](const Vec3& u, const Vec3& v, const Vec3& w, int i) {
            return u[i] * u[i] + v[i] * v[i] + w[i] * w[i] + u[i] * v[i] + v[i] * w[i] + w[i] * u[i];
        };
        auto mixed = [](const Vec3& u, const Vec3& v, const Vec3& w, int i, int j) {
            return 2.0 * (u[i] * u[j] + v[i] * v[j] + w[i] * w[j]) + u[i] * v[j] + v[i] * u[j] +
                   v[i] * w[j] + w[i] * v[j] + w[i] * u[j] + u[i] * w[j];
        };
        ixx += detj / 60.0 * (sq(a, b, c, 1) + sq(a, b, c, 2));
        iyy += detj / 60.0 * (sq(a, b, c, 0) + sq(a, b, c, 2));
        izz += detj / 60.0 * (sq(a, b, c, 0) + sq(a, b, c, 1));
        ixy += detj / 120.0 * mixed(a, b, c, 0, 1);
        iyz += detj / 120.0 * mixed(a, b, c, 1, 2);
        izx += detj / 120.0 * mixed(a, b, c, 2, 0);
    }
    mass = density * std::max(m, 0.0);
    com = (m > 0.0) ? Vec3(first / m) : bbox.center();
    Mat3 io;
    io << ixx, -ixy, -izx,
         -ixy, iyy, -iyz,
         -izx, -iyz, izz;
    io *= density;
    // Shift from origin to COM (parallel axis).
    const Vec3& r = com;
    Mat3 shift;
    shift << r.y() * r.y() + r.z() * r.z(), -r.x() * r.y(), -r.x() * r.z(),
             -r.x() * r.y(), r.x() * r.x() + r.z() * r.z(), -r.y() * r.z(),
             -r.x() * r.z(), -r.y() * r.z(), r.x() * r.x() + r.y() * r.y();
    inertia = io - mass * shift;

    // Watertight iff every undirected edge is shared by exactly two triangles.
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;
    for (const auto& t : triangles) {
        for (int e = 0; e < 3; ++e) {
            std::uint32_t u = t[e], v = t[(e + 1) % 3];
            if (u > v) std::swap(u, v);
            ++edges[{u, v}];
        }
    }
    watertight = !edges.empty() &&
                 std::all_of(edges.begin(), edges.end(),
                             [](const auto& kv) { return kv.second == 2; });
}

TriMesh load_mesh(const std::string& path, double scale, double density) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    if (bytes.empty()) throw ParseError(path + ": empty file");

    TriMesh mesh;
    if (has_suffix(path, ".obj")) {
        mesh = parse_obj(bytes, path);
    } else if (looks_binary_stl(bytes)) {
        mesh = parse_stl_binary(bytes);
    } else {
        const std::string head(bytes.data(), std::min<std::size_t>(bytes.size(), 5));
        if (head == "solid")
            mesh = parse_stl_ascii(bytes, path);
        else
            throw ParseError(path + ": unrecognized mesh format");
    }
    if (mesh.triangles.empty()) throw EmptyMesh(path + ": no triangles");

    if (scale != 1.0)
        for (Vec3& v : mesh.vertices) v *= scale;
    mesh.finalize(density);
    return mesh;
}

void write_stl_binary(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path + ": cannot open for writing");
    char header[80] = {};
    std::snprintf(header, sizeof(header), "placegen mesh");
    out.write(header, 80);
    const std::uint32_t n = static_cast<std::uint32_t>(mesh.triangles.size());
    out.write(reinterpret_cast<const char*>(&n), 4);
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        const auto& t = mesh.triangles[i];
        float rec[12];
        const Vec3 nrm = mesh.tri_normal.empty()
                             ? Vec3((mesh.vertices[t[1]] - mesh.vertices[t[0]])
                                        .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]])
                                        .normalized())
                             : mesh.tri_normal[i];
        rec[0] = static_cast<float>(nrm.x());
        rec[1] = static_cast<float>(nrm.y());
        rec[2] = static_cast<float>(nrm.z());
        for (int c = 0; c < 3; ++c) {
            const Vec3& v = mesh.vertices[t[c]];
            rec[3 + 3 * c] = static_cast<float>(v.x());
            rec[4 + 3 * c] = static_cast<float>(v.y());
            rec[5 + 3 * c] = static_cast<float>(v.z());
        }
        out.write(reinterpret_cast<const char*>(rec), 48);
        const std::uint16_t attr = 0;
        out.write(reinterpret_cast<const char*>(&attr), 2);
    }
    if (!out) throw IoError(path + ": write failed");
}

void write_obj(const TriMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out.precision(17);
    for (const Vec3& v : mesh.vertices)
        out << "v " << v.x() << " " << v.y() << " " << v.z() << "\n";
    for (const auto& t : mesh.triangles)
        out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    if (!out) throw IoError(path + ": write failed");
}

PrincipalAxes principal_axes(const TriMesh& mesh) {
    if (mesh.total_area <= 0.0) throw DegenerateGeometry("mesh has zero surface area");

    // Exact area-weighted surface mean and second moment, per-triangle:
    //   \int_T p dA      = A/3 * (v0+v1+v2)
    //   \int_T p p^T dA  = A/12 * (v0v0^T+v1v1^T+v2v2^T + s s^T), s = v0+v1+v2
    Vec3 mean = Vec3::Zero();
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        const auto& t = mesh.triangles[i];
        mean += mesh.tri_area[i] / 3.0 *
                (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]);
    }
    mean /= mesh.total_area;

    Mat3 second = Mat3::Zero();
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        const auto& t = mesh.triangles[i];
        const Vec3 a = mesh.vertices[t[0]] - mean;
        const Vec3 b = mesh.vertices[t[1]] - mean;
        const Vec3 c = mesh.vertices[t[2]] - mean;
        const Vec3 s = a + b + c;
        second += mesh.tri_area[i] / 12.0 *
                  (a * a.transpose() + b * b.transpose() + c * c.transpose() +
                   s * s.transpose());
    }
    const Mat3 cov = second / mesh.total_area;

    Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
    const Vec3 evals = es.eigenvalues(); // ascending
    const double l0 = evals(2), l2 = evals(0);

    PrincipalAxes out;
    const bool rank_deficient = l2 < 1e-9 * std::max(l0, 1e-300);
    const bool isotropic = (l0 - l2) < 1e-2 * std::max(l0, 1e-300);
    if (rank_deficient || isotropic) {
        out.degenerate_fallback = true;
        // bbox axes sorted by extent, descending
        const Vec3 ext = mesh.bbox.extents();
        std::array<int, 3> order{0, 1, 2};
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return ext[a] > ext[b]; });
        Mat3 axes = Mat3::Zero();
        for (int c = 0; c < 3; ++c) axes(order[c], c) = 1.0;
        if (axes.determinant() < 0.0) axes.col(2) *= -1.0;
        out.axes = axes;
        return out;
    }

    Mat3 axes;
    axes.col(0) = es.eigenvectors().col(2);
    axes.col(1) = es.eigenvectors().col(1);
    axes.col(2) = es.eigenvectors().col(0);
    // Sign convention on the first two axes, third fixed by handedness.
    for (int c = 0; c < 2; ++c) {
        int imax = 0;
        axes.col(c).cwiseAbs().maxCoeff(&imax);
        if (axes(imax, c) < 0.0) axes.col(c) *= -1.0;
    }
    axes.col(2) = axes.col(0).cross(axes.col(1));
    out.axes = axes;
    return out;
}

SurfaceSamples sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed) {
    if (mesh.triangles.empty()) throw EmptyMesh("cannot sample an empty mesh");
    if (n < 1) throw Error("sample_surface: n must be >= 1");

    std::vector<double> cdf(mesh.triangles.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        acc += mesh.tri_area[i];
        cdf[i] = acc;
    }

    Rng rng(seed);
    SurfaceSamples out;
    out.points.reserve(n);
    out.normals.reserve(n);
    out.triangle.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        const double u = rng.uniform01() * acc;
        const std::size_t t =
            std::min(static_cast<std::size_t>(
                         std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin()),
                     cdf.size() - 1);
        // uniform barycentric via sqrt trick
        const double r1 = std::sqrt(rng.uniform01());
        const double r2 = rng.uniform01();
        const Vec3 a = mesh.tri_vertex(t, 0), b = mesh.tri_vertex(t, 1), c = mesh.tri_vertex(t, 2);
        out.points.push_back((1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c);
        out.normals.push_back(mesh.tri_normal[t]);
        out.triangle.push_back(static_cast<std::uint32_t>(t));
    }
    return out;
}

} // namespace placegen
