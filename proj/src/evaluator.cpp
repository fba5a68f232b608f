#include "placegen/evaluator.hpp"

#include <thread>

namespace placegen {

Evaluator::Evaluator(const Scenario& scenario, int threads) : scenario_(scenario) {
    threads_ = threads > 0 ? threads
                           : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::vector<EvalRecord> Evaluator::run(
    std::vector<std::pair<Genome, std::optional<Pose>>> batch) {
    std::vector<EvalRecord> results(batch.size());

    auto work = [&](int worker) {
        for (std::size_t i = worker; i < batch.size(); i += threads_) {
            EvalRecord& rec = results[i];
            rec.genome = std::move(batch[i].first);
            rec.initial_pose = batch[i].second;
            if (rec.initial_pose) {
                auto [traj, outcome] =
                    settle(*rec.initial_pose, scenario_.object, scenario_.support_sdf,
                           scenario_.sim);
                rec.outcome = outcome;
            } else {
                rec.outcome.valid = false;
                rec.outcome.reason = RejectReason::none;
                rec.outcome.sigma = std::numeric_limits<double>::infinity();
                rec.outcome.fitness = -rec.outcome.sigma;
            }
        }
    };

    if (threads_ <= 1 || batch.size() <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        const int n = std::min<int>(threads_, static_cast<int>(batch.size()));
        pool.reserve(n);
        for (int w = 0; w < n; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < results.size(); ++i)
        results[i].eval_index = evaluations_ + static_cast<std::int64_t>(i);
    evaluations_ += static_cast<std::int64_t>(results.size());
    return results;
}

Elite make_elite(const EvalRecord& rec) {
    Elite e;
    e.genome = rec.genome;
    e.initial_pose = rec.initial_pose.value_or(Pose{});
    e.fitness = rec.outcome.fitness;
    e.feature = rec.outcome.feature;
    e.reason = rec.outcome.reason;
    return e;
}

} // namespace placegen
