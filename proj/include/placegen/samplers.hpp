#pragma once

#include "placegen/evaluator.hpp"
#include "placegen/space.hpp"

namespace placegen {

enum class BaselineMethod { rand_sample, face_alignment, pca_alignment, contact_rand_sample };

const char* to_string(BaselineMethod m);

struct SamplerConfig {
    BaselineMethod method = BaselineMethod::rand_sample;
    double pca_rot_sigma = 0.08726646259971647; // 5 deg
    double pca_pos_sigma = 0.005;               // m
    double pca_clearance = 0.005;               // m
    std::uint64_t seed = 0;
};

/// Uniform position in the placement volume, uniform random rotation.
Pose sample_rand(const Scenario& sc, Rng& rng);

/// Area-weighted triangle pair, normals antiparallel, random spin, centroids
/// coincident, then bisection backoff along the support normal until the
/// overlap test clears. Throws NoSeparation when no clear pose exists within
/// one object bbox diagonal.
Pose sample_face_alignment(const Scenario& sc, Rng& rng);

/// First principal axes aligned (sign toward the up half-space), Gaussian
/// rotation/translation perturbation, COM placed above the support top face
/// at a clearance gap.
Pose sample_pca_alignment(const Scenario& sc, const SamplerConfig& cfg, Rng& rng);

struct BaselineRunResult {
    Archive archive;
    CoverageSeries series;
    std::int64_t sample_failures = 0; // construction errors charged to budget
};

/// sample -> settle -> insert loop under a fixed evaluation budget.
BaselineRunResult run_baseline(const Scenario& sc, const SamplerConfig& cfg,
                               std::int64_t budget, int threads);

} // namespace placegen
