#include "placegen/samplers.hpp"

#include <cmath>

#include "placegen/error.hpp"

namespace placegen {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

Vec3 uniform_direction(Rng& rng) {
    const double z = rng.uniform(-1.0, 1.0);
    const double a = rng.uniform(0.0, kTwoPi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Vec3(r * std::cos(a), r * std::sin(a), z);
}
} // namespace

const char* to_string(BaselineMethod m) {
    switch (m) {
        case BaselineMethod::rand_sample: return "rand_sample";
        case BaselineMethod::face_alignment: return "face_alignment";
        case BaselineMethod::pca_alignment: return "pca_alignment";
        case BaselineMethod::contact_rand_sample: return "contact_rand_sample";
    }
    return "rand_sample";
}

Pose sample_rand(const Scenario& sc, Rng& rng) {
    Pose p;
    for (int i = 0; i < 3; ++i) p.position[i] = rng.uniform(sc.volume.lo[i], sc.volume.hi[i]);
    p.orientation = uniform_quaternion(rng);
    return p;
}

Pose sample_face_alignment(const Scenario& sc, Rng& rng) {
    const TriMesh& obj = sc.object.mesh;
    const TriMesh& sup = sc.support;

    const std::size_t t_o = pick_triangle(sc.object_area_cdf, rng.uniform01());
    const std::size_t t_s = pick_triangle(sc.support_area_cdf, rng.uniform01());
    const double spin = rng.uniform(0.0, kTwoPi);

    const Vec3 n_o = obj.tri_normal[t_o];
    const Vec3 n_s = sup.tri_normal[t_s];
    const Quat align = Quat::FromTwoVectors(n_o, -n_s);
    const Quat q = (Quat(Eigen::AngleAxisd(spin, n_s)) * align).normalized();

    const Vec3 c_o = obj.tri_centroid(t_o) - obj.com; // COM frame
    const Vec3 c_s = sup.tri_centroid(t_s);

    Pose pose;
    pose.orientation = q;
    pose.position = c_s - q * c_o;

    auto overlapping = [&](double offset) {
        Pose candidate = pose;
        candidate.position += offset * n_s;
        for (const Vec3& s : sc.object.samples)
            if (sc.support_sdf.value(candidate.apply(s)) < -sc.sim.penetration_tol) return true;
        return false;
    };

    if (!overlapping(0.0)) return pose;

    double hi = sc.object.bbox_diagonal;
    if (overlapping(hi)) throw NoSeparation("face_alignment: no clear pose within bbox diagonal");
    double lo = 0.0;
    for (int iter = 0; iter < 32; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (overlapping(mid))
            lo = mid;
        else
            hi = mid;
    }
    pose.position += hi * n_s;
    return pose;
}

Pose sample_pca_alignment(const Scenario& sc, const SamplerConfig& cfg, Rng& rng) {
    const PrincipalAxes obj_axes = principal_axes(sc.object.mesh);
    const PrincipalAxes sup_axes = principal_axes(sc.support);

    Vec3 target = sup_axes.axes.col(0);
    const Vec3 up = -sc.sim.gravity.normalized();
    if (target.dot(up) < 0.0) target = -target;

    const Quat align = Quat::FromTwoVectors(obj_axes.axes.col(0), target);

    const double angle = rng.normal(0.0, cfg.pca_rot_sigma);
    const Vec3 axis = uniform_direction(rng);
    const Vec3 jitter(rng.normal(0.0, cfg.pca_pos_sigma), rng.normal(0.0, cfg.pca_pos_sigma),
                      rng.normal(0.0, cfg.pca_pos_sigma));

    Pose pose;
    pose.orientation = (Quat(Eigen::AngleAxisd(angle, axis)) * align).normalized();

    double lowest = std::numeric_limits<double>::max();
    for (const Vec3& s : sc.object.samples)
        lowest = std::min(lowest, (pose.orientation * s).z());

    const Vec3 top_center(sc.support.bbox.center().x(), sc.support.bbox.center().y(),
                          sc.support.bbox.hi.z());
    pose.position = top_center + Vec3(0, 0, cfg.pca_clearance - lowest) + jitter;
    return pose;
}

BaselineRunResult run_baseline(const Scenario& sc, const SamplerConfig& cfg,
                               std::int64_t budget, int threads) {
    if (budget < 1) throw ConfigError("run_baseline: budget must be >= 1");

    Rng rng(cfg.seed);
    Evaluator evaluator(sc, threads);
    BaselineRunResult result{Archive(sc.archive_spec), CoverageSeries{}, 0};
    const std::int64_t total = sc.archive_spec.total_cells();

    constexpr std::int64_t kChunk = 256;
    while (evaluator.evaluations() < budget) {
        const std::int64_t n = std::min(kChunk, budget - evaluator.evaluations());
        std::vector<std::pair<Genome, std::optional<Pose>>> batch;
        batch.reserve(n);
        for (std::int64_t i = 0; i < n; ++i) {
            Genome genome;
            std::optional<Pose> pose;
            try {
                switch (cfg.method) {
                    case BaselineMethod::rand_sample:
                        pose = sample_rand(sc, rng);
                        break;
                    case BaselineMethod::face_alignment:
                        pose = sample_face_alignment(sc, rng);
                        break;
                    case BaselineMethod::pca_alignment:
                        pose = sample_pca_alignment(sc, cfg, rng);
                        break;
                    case BaselineMethod::contact_rand_sample:
                        genome = random_genome(SpaceTag::contact, rng);
                        pose = decode_contact(genome, sc);
                        break;
                }
            } catch (const NoSeparation&) {
                ++result.sample_failures; // charged against the budget
            } catch (const DegenerateGeometry&) {
                ++result.sample_failures;
            }
            batch.emplace_back(std::move(genome), pose);
        }

        const auto records = evaluator.run(std::move(batch));
        for (const EvalRecord& rec : records) {
            if (rec.outcome.valid) result.archive.offer(make_elite(rec));
            result.series.record(rec.eval_index + 1,
                                 static_cast<std::int64_t>(result.archive.filled_cells()), total);
        }
    }
    result.series.record(budget, static_cast<std::int64_t>(result.archive.filled_cells()), total);
    return result;
}

} // namespace placegen
