#include "placegen/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "placegen/error.hpp"

namespace placegen {

namespace {

std::vector<std::int64_t> elite_cells(const Archive& archive) {
    std::vector<std::int64_t> cells;
    cells.reserve(archive.filled_cells());
    for (const auto& [cell, elite] : archive.cells()) cells.push_back(cell);
    return cells;
}

void offer_and_record(Archive& archive, CoverageSeries& series,
                      const std::vector<EvalRecord>& records) {
    const std::int64_t total = archive.spec().total_cells();
    for (const EvalRecord& rec : records) {
        if (rec.outcome.valid) archive.offer(make_elite(rec));
        series.record(rec.eval_index + 1, static_cast<std::int64_t>(archive.filled_cells()),
                      total);
    }
}

std::vector<std::pair<std::int64_t, double>> compute_novelty(const Archive& archive, int k,
                                                             double char_length) {
    std::vector<std::pair<std::int64_t, double>> out;
    const auto& cells = archive.cells();
    const std::size_t n = cells.size();
    if (n < 2) return out;

    std::vector<std::int64_t> ids;
    std::vector<FeatureDescriptor> feats;
    ids.reserve(n);
    feats.reserve(n);
    for (const auto& [cell, elite] : cells) {
        ids.push_back(cell);
        feats.push_back(elite.feature);
    }

    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            dist[j] = (i == j) ? std::numeric_limits<double>::max()
                               : feature_distance(feats[i], feats[j], char_length);
        const std::size_t kk = std::min<std::size_t>(k, n - 1);
        std::nth_element(dist.begin(), dist.begin() + kk - 1, dist.end());
        const double mean =
            std::accumulate(dist.begin(), dist.begin() + kk, 0.0) / static_cast<double>(kk);
        out.emplace_back(ids[i], mean);
    }
    return out;
}

QdRunResult run_map_elites(const Scenario& sc, SpaceTag space, const QdParams& params,
                           std::uint64_t seed, int threads, bool success_greedy) {
    if (params.budget < params.mu)
        throw ConfigError("map-elites: budget must be at least mu");

    Rng rng(seed);
    Evaluator evaluator(sc, threads);
    QdRunResult result{Archive(sc.archive_spec), CoverageSeries{}, {}};

    auto decode_batch = [&](std::vector<Genome> genomes) {
        std::vector<std::pair<Genome, std::optional<Pose>>> batch;
        batch.reserve(genomes.size());
        for (Genome& g : genomes) {
            Pose pose = decode(g, sc);
            batch.emplace_back(std::move(g), pose);
        }
        return evaluator.run(std::move(batch));
    };

    // Initialization: mu random genomes.
    {
        std::vector<Genome> init;
        init.reserve(params.mu);
        for (int i = 0; i < params.mu; ++i) init.push_back(random_genome(space, rng));
        offer_and_record(result.archive, result.series, decode_batch(std::move(init)));
    }

    while (evaluator.evaluations() < params.budget) {
        const std::int64_t n =
            std::min<std::int64_t>(params.lambda, params.budget - evaluator.evaluations());
        // Success-greedy selection draws parents from elites whose outcomes
        // were valid; since only valid outcomes are archived, both variants
        // select uniformly over the archive and differ in the logged metrics.
        const std::vector<std::int64_t> cells = elite_cells(result.archive);
        std::vector<Genome> offspring;
        offspring.reserve(n);
        for (std::int64_t i = 0; i < n; ++i) {
            if (cells.empty()) {
                offspring.push_back(random_genome(space, rng));
            } else {
                const std::int64_t cell = cells[rng.below(cells.size())];
                const Genome& parent = result.archive.cells().at(cell).genome;
                offspring.push_back(mutate(parent, params.ind_pb, params.mut_sigma, rng));
            }
        }
        offer_and_record(result.archive, result.series, decode_batch(std::move(offspring)));
    }

    result.series.record(params.budget, static_cast<std::int64_t>(result.archive.filled_cells()),
                         sc.archive_spec.total_cells());
    if (success_greedy)
        result.novelty = compute_novelty(result.archive, params.novelty_k, sc.sim.char_length);
    return result;
}

// ---------------------------------------------------------------------------
// CMA-ES emitter (rank-mu update, weights from the batch size)

class CmaEmitter {
public:
    CmaEmitter(int dim, int batch, double sigma0, std::uint64_t seed, std::uint64_t stream)
        : dim_(dim), batch_(batch), sigma0_(sigma0), rng_(seed, stream) {
        mu_ = batch / 2;
        weights_.resize(mu_);
        double sum = 0.0;
        for (int i = 0; i < mu_; ++i) {
            weights_[i] = std::log((batch + 1.0) / 2.0) - std::log(i + 1.0);
            sum += weights_[i];
        }
        double sq = 0.0;
        for (double& w : weights_) {
            w /= sum;
            sq += w * w;
        }
        mu_eff_ = 1.0 / sq;

        const double n = dim_;
        c_sigma_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 5.0);
        d_sigma_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) +
                   c_sigma_;
        c_c_ = (4.0 + mu_eff_ / n) / (n + 4.0 + 2.0 * mu_eff_ / n);
        c_1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
        c_mu_ = std::min(1.0 - c_1_, 2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) /
                                         ((n + 2.0) * (n + 2.0) + mu_eff_));
        chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
        reset(Eigen::VectorXd::Zero(dim_));
    }

    void reset(const Eigen::VectorXd& mean) {
        mean_ = mean;
        sigma_ = sigma0_;
        cov_ = Eigen::MatrixXd::Identity(dim_, dim_);
        p_sigma_ = Eigen::VectorXd::Zero(dim_);
        p_c_ = Eigen::VectorXd::Zero(dim_);
        generation_ = 0;
        stale_generations_ = 0;
        refresh_decomposition();
    }

    bool needs_restart() const {
        return sigma_ < 1e-8 || !mean_.allFinite() || !cov_.allFinite() || sigma_ > 1e6;
    }
    int stale_generations() const { return stale_generations_; }

    std::vector<Genome> sample_batch(SpaceTag space, int n) {
        std::vector<Genome> out;
        out.reserve(n);
        last_samples_.clear();
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd z(dim_);
            for (int d = 0; d < dim_; ++d) z(d) = rng_.normal();
            Eigen::VectorXd x = mean_ + sigma_ * (basis_scaled_ * z);
            for (int d = 0; d < dim_; ++d) x(d) = std::clamp(x(d), -1.0, 1.0);
            last_samples_.push_back(x);
            Genome g;
            g.space = space;
            g.values.assign(x.data(), x.data() + dim_);
            out.push_back(std::move(g));
        }
        return out;
    }

    /// Rank-based update from (accepted, delta) per sampled candidate.
    /// `order` must hold candidate indices best-first.
    void update(const std::vector<int>& order, bool any_accepted) {
        if (static_cast<int>(last_samples_.size()) != batch_) return; // partial batch
        ++generation_;
        stale_generations_ = any_accepted ? 0 : stale_generations_ + 1;

        const Eigen::VectorXd old_mean = mean_;
        Eigen::VectorXd y_w = Eigen::VectorXd::Zero(dim_);
        for (int i = 0; i < mu_; ++i) {
            const Eigen::VectorXd y = (last_samples_[order[i]] - old_mean) / sigma_;
            y_w += weights_[i] * y;
        }
        mean_ = old_mean + sigma_ * y_w;

        p_sigma_ = (1.0 - c_sigma_) * p_sigma_ +
                   std::sqrt(c_sigma_ * (2.0 - c_sigma_) * mu_eff_) * (inv_sqrt_cov_ * y_w);
        const double ps_norm = p_sigma_.norm();
        const double denom =
            std::sqrt(1.0 - std::pow(1.0 - c_sigma_, 2.0 * generation_));
        const bool h_sigma =
            ps_norm / denom < (1.4 + 2.0 / (dim_ + 1.0)) * chi_n_;

        p_c_ = (1.0 - c_c_) * p_c_;
        if (h_sigma) p_c_ += std::sqrt(c_c_ * (2.0 - c_c_) * mu_eff_) * y_w;

        Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(dim_, dim_);
        for (int i = 0; i < mu_; ++i) {
            const Eigen::VectorXd y = (last_samples_[order[i]] - old_mean) / sigma_;
            rank_mu += weights_[i] * (y * y.transpose());
        }
        const double delta_h = h_sigma ? 0.0 : c_c_ * (2.0 - c_c_);
        cov_ = (1.0 - c_1_ - c_mu_) * cov_ +
               c_1_ * (p_c_ * p_c_.transpose() + delta_h * cov_) + c_mu_ * rank_mu;
        cov_ = 0.5 * (cov_ + cov_.transpose().eval());

        sigma_ *= std::exp(std::min(1.0, (c_sigma_ / d_sigma_) * (ps_norm / chi_n_ - 1.0)));
        refresh_decomposition();
    }

private:
    void refresh_decomposition() {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov_);
        Eigen::VectorXd evals = es.eigenvalues().cwiseMax(1e-20);
        const Eigen::MatrixXd b = es.eigenvectors();
        basis_scaled_ = b * evals.cwiseSqrt().asDiagonal();
        inv_sqrt_cov_ = b * evals.cwiseSqrt().cwiseInverse().asDiagonal() * b.transpose();
    }

    int dim_, batch_, mu_ = 0;
    double sigma0_;
    Rng rng_;
    std::vector<double> weights_;
    double mu_eff_ = 0, c_sigma_ = 0, d_sigma_ = 0, c_c_ = 0, c_1_ = 0, c_mu_ = 0, chi_n_ = 0;

    Eigen::VectorXd mean_, p_sigma_, p_c_;
    Eigen::MatrixXd cov_, basis_scaled_, inv_sqrt_cov_;
    double sigma_ = 0.0;
    long generation_ = 0;
    int stale_generations_ = 0;
    std::vector<Eigen::VectorXd> last_samples_;
};

} // namespace

double feature_distance(const FeatureDescriptor& a, const FeatureDescriptor& b,
                        double char_length) {
    const double dp2 = (a.position - b.position).squaredNorm() / (char_length * char_length);
    const double ang = geodesic_angle(a.orientation, b.orientation);
    return std::sqrt(dp2 + ang * ang);
}

QdRunResult run_me_rand(const Scenario& sc, SpaceTag space, const QdParams& params,
                        std::uint64_t seed, int threads) {
    return run_map_elites(sc, space, params, seed, threads, false);
}

QdRunResult run_me_scs(const Scenario& sc, SpaceTag space, const QdParams& params,
                       std::uint64_t seed, int threads) {
    return run_map_elites(sc, space, params, seed, threads, true);
}

QdRunResult run_cma_mae(const Scenario& sc, SpaceTag space, const QdParams& params,
                        std::uint64_t seed, int threads) {
    if (params.budget < static_cast<std::int64_t>(params.emitters) * params.emitter_batch)
        throw ConfigError("cma-mae: budget must cover at least one full generation");

    Rng restart_rng(seed, 0xa5a5a5a5ULL);
    Evaluator evaluator(sc, threads);
    QdRunResult result{Archive::annealed(sc.archive_spec, params.archive_alpha, params.f_min),
                       CoverageSeries{}, {}};
    const int dim = genome_length(space);

    std::vector<CmaEmitter> emitters;
    emitters.reserve(params.emitters);
    for (int e = 0; e < params.emitters; ++e) {
        emitters.emplace_back(dim, params.emitter_batch, params.initial_step, seed, e + 1);
        // spread initial means uniformly
        Eigen::VectorXd m(dim);
        for (int d = 0; d < dim; ++d) m(d) = restart_rng.uniform(-1.0, 1.0);
        emitters[e].reset(m);
    }

    auto restart_mean = [&]() {
        Eigen::VectorXd m(dim);
        if (result.archive.filled_cells() > 0) {
            const std::vector<std::int64_t> cells = elite_cells(result.archive);
            const Genome& g =
                result.archive.cells().at(cells[restart_rng.below(cells.size())]).genome;
            for (int d = 0; d < dim; ++d) m(d) = g.values[d];
        } else {
            for (int d = 0; d < dim; ++d) m(d) = restart_rng.uniform(-1.0, 1.0);
        }
        return m;
    };

    while (evaluator.evaluations() < params.budget) {
        for (CmaEmitter& emitter : emitters) {
            if (evaluator.evaluations() >= params.budget) break;
            const std::int64_t n = std::min<std::int64_t>(
                params.emitter_batch, params.budget - evaluator.evaluations());

            std::vector<Genome> genomes = emitter.sample_batch(space, static_cast<int>(n));
            std::vector<std::pair<Genome, std::optional<Pose>>> batch;
            batch.reserve(genomes.size());
            for (Genome& g : genomes) {
                Pose pose = decode(g, sc);
                batch.emplace_back(std::move(g), pose);
            }
            const auto records = evaluator.run(std::move(batch));

            std::vector<char> accepted(records.size(), 0);
            std::vector<double> delta(records.size(), -std::numeric_limits<double>::infinity());
            const std::int64_t total = sc.archive_spec.total_cells();
            bool any = false;
            for (std::size_t i = 0; i < records.size(); ++i) {
                const EvalRecord& rec = records[i];
                if (rec.outcome.valid) {
                    const OfferOutcome offer = result.archive.offer(make_elite(rec));
                    accepted[i] = offer.accepted() ? 1 : 0;
                    if (offer.status != OfferStatus::out_of_bounds) delta[i] = offer.delta;
                }
                any = any || accepted[i];
                result.series.record(rec.eval_index + 1,
                                     static_cast<std::int64_t>(result.archive.filled_cells()),
                                     total);
            }

            std::vector<int> order(records.size());
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                if (accepted[a] != accepted[b]) return accepted[a] > accepted[b];
                if (delta[a] != delta[b]) return delta[a] > delta[b];
                return a < b;
            });
            emitter.update(order, any);

            if (emitter.needs_restart() ||
                emitter.stale_generations() >= params.restart_patience)
                emitter.reset(restart_mean());
        }
    }

    result.series.record(params.budget, static_cast<std::int64_t>(result.archive.filled_cells()),
                         sc.archive_spec.total_cells());
    return result;
}

} // namespace placegen
