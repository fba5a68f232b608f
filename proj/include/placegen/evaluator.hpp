#pragma once

#include <optional>
#include <vector>

#include "placegen/space.hpp"

namespace placegen {

/// One consumed budget unit: a candidate initial pose and its settle outcome.
/// Candidates without a pose (sampler construction failures) still consume
/// budget and carry an empty outcome.
struct EvalRecord {
    Genome genome;                 // empty values for pose-only samplers
    std::optional<Pose> initial_pose;
    SettleOutcome outcome;
    std::int64_t eval_index = 0;
};

/// Deterministic parallel map over settle(): results are identical for any
/// thread count because each rollout is evaluated independently and folded
/// back in submission order.
class Evaluator {
public:
    Evaluator(const Scenario& scenario, int threads);

    /// Evaluates candidates in order; assigns ascending eval indices.
    std::vector<EvalRecord> run(std::vector<std::pair<Genome, std::optional<Pose>>> batch);

    std::int64_t evaluations() const { return evaluations_; }
    int threads() const { return threads_; }

private:
    const Scenario& scenario_;
    int threads_;
    std::int64_t evaluations_ = 0;
};

Elite make_elite(const EvalRecord& rec);

} // namespace placegen
