#pragma once

#include "placegen/evaluator.hpp"
#include "placegen/space.hpp"

namespace placegen {

struct QdParams {
    int mu = 500;               // initialization population
    int lambda = 500;           // offspring per iteration
    int novelty_k = 15;         // neighbors for the logged novelty score
    double ind_pb = 0.3;        // per-gene mutation probability
    double mut_sigma = 0.1;     // mutation standard deviation
    std::int64_t budget = 100000; // N_e
    // CMA-MAE
    int emitters = 15;
    int emitter_batch = 36;
    double archive_alpha = 0.2;
    double f_min = -10000.0;
    double initial_step = 0.3;
    int restart_patience = 50;  // generations without acceptance before restart
};

struct QdRunResult {
    Archive archive;
    CoverageSeries series;
    // per-elite novelty scores (cell -> mean distance to k nearest features);
    // filled by run_me_scs, empty otherwise
    std::vector<std::pair<std::int64_t, double>> novelty;
};

QdRunResult run_me_rand(const Scenario& sc, SpaceTag space, const QdParams& params,
                        std::uint64_t seed, int threads);

/// MAP-Elites with success-greedy parent selection; also logs per-elite
/// novelty over features for analysis.
QdRunResult run_me_scs(const Scenario& sc, SpaceTag space, const QdParams& params,
                       std::uint64_t seed, int threads);

/// CMA-MAE: independent CMA-ES emitters ranked by archive improvement against
/// annealed per-cell acceptance thresholds.
QdRunResult run_cma_mae(const Scenario& sc, SpaceTag space, const QdParams& params,
                        std::uint64_t seed, int threads);

/// Distance in feature space matching the pose-variance scales.
double feature_distance(const FeatureDescriptor& a, const FeatureDescriptor& b,
                        double char_length);

} // namespace placegen
