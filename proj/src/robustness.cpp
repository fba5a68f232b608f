#include "placegen/robustness.hpp"

#include <thread>

#include "placegen/error.hpp"

namespace placegen {

namespace {
constexpr double kSigmaCap = 1e300; // stored in place of non-finite variances
}

Pose perturb_pose(const Pose& pose, const DrConfig& cfg, double bbox_diagonal, Rng& rng) {
    const int axis = static_cast<int>(rng.below(6));
    const double sign = rng.coin() ? 1.0 : -1.0;
    Pose out = pose;
    if (axis < 3) {
        out.position[axis] += sign * cfg.translation_frac * bbox_diagonal;
    } else {
        Vec3 u = Vec3::Zero();
        u[axis - 3] = 1.0;
        out.orientation = Quat(Eigen::AngleAxisd(sign * cfg.rotation_mag, u)) * out.orientation;
    }
    return out;
}

namespace {

RigidBodyState perturbed_state(const Elite& elite, const Scenario& sc, const DrConfig& cfg,
                               Rng& rng) {
    RigidBodyState s;
    if (!cfg.mass_scaled_impulse) {
        s.pose = perturb_pose(elite.feature, cfg, sc.object.bbox_diagonal, rng);
        return s;
    }
    s.pose = elite.feature;
    const int axis = static_cast<int>(rng.below(6));
    const double sign = rng.coin() ? 1.0 : -1.0;
    Vec3 u = Vec3::Zero();
    u[axis % 3] = 1.0;
    if (axis < 3) {
        s.lin_vel = sign * (cfg.impulse_magnitude / sc.object.mass) * u;
    } else {
        // angular impulse with a half-diagonal moment arm
        const Mat3 r = s.pose.orientation.toRotationMatrix();
        const Mat3 inv = r * sc.object.inertia_inv * r.transpose();
        s.ang_vel = inv * (sign * cfg.impulse_magnitude * 0.5 * sc.object.bbox_diagonal * u);
    }
    return s;
}

} // namespace

RobustLabel dr_filter(const Elite& elite, const Scenario& sc, const DrConfig& cfg, Rng rng) {
    if (cfg.trials < 1) throw ConfigError("dr_filter: trials must be >= 1");
    RobustLabel label;
    label.robust = true;
    label.trial_sigmas.reserve(cfg.trials);

    for (int m = 0; m < cfg.trials; ++m) {
        const RigidBodyState s0 = perturbed_state(elite, sc, cfg, rng);
        const Trajectory traj =
            rollout(s0, cfg.resettle_steps, sc.object, sc.support_sdf, sc.sim);

        double sigma;
        if (static_cast<int>(traj.states.size()) != cfg.resettle_steps + 1) {
            sigma = kSigmaCap; // simulator blowup counts as a failed trial
        } else {
            std::vector<Pose> poses;
            poses.reserve(traj.states.size());
            for (const RigidBodyState& s : traj.states) poses.push_back(s.pose);
            sigma = pose_variance(poses, sc.sim.char_length);
            if (!std::isfinite(sigma)) sigma = kSigmaCap;
        }
        label.trial_sigmas.push_back(sigma);
        if (!(sigma < cfg.variance_threshold)) label.robust = false;

        const Pose& final_pose = traj.states.back().pose;
        const double dev_pos = (final_pose.position - elite.feature.position).norm();
        const double dev_ang = geodesic_angle(final_pose.orientation, elite.feature.orientation);
        label.deviation_pos.push_back(dev_pos);
        label.deviation_angle.push_back(dev_ang);
        label.same_pose.push_back(
            dev_pos <= cfg.same_pose_pos_frac * sc.object.bbox_diagonal &&
                    dev_ang <= cfg.same_pose_angle
                ? 1
                : 0);
    }
    label.worst_sigma = *std::max_element(label.trial_sigmas.begin(), label.trial_sigmas.end());
    return label;
}

LabelSummary label_archive(Archive& archive, const Scenario& sc, const DrConfig& cfg,
                           int threads) {
    if (archive.filled_cells() == 0)
        throw NonEmptyRequired("label_archive: archive has no elites");
    if (!(archive.spec() == sc.archive_spec))
        throw SpecMismatch("label_archive: archive spec differs from the scenario spec");

    std::vector<std::int64_t> cells;
    cells.reserve(archive.filled_cells());
    for (const auto& [cell, elite] : archive.cells()) cells.push_back(cell);

    std::vector<RobustLabel> labels(cells.size());
    const int n_threads =
        threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    auto work = [&](int worker) {
        for (std::size_t i = worker; i < cells.size(); i += n_threads) {
            const Elite& elite = archive.cells().at(cells[i]);
            labels[i] = dr_filter(elite, sc, cfg,
                                  Rng(cfg.seed, static_cast<std::uint64_t>(cells[i])));
        }
    };
    if (n_threads <= 1 || cells.size() <= 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        const int n = std::min<int>(n_threads, static_cast<int>(cells.size()));
        for (int w = 0; w < n; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }

    LabelSummary summary;
    summary.total = static_cast<std::int64_t>(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        Elite& elite = archive.cells_mutable().at(cells[i]);
        elite.robust = labels[i].robust;
        elite.dr_sigmas = labels[i].trial_sigmas;
        ++summary.valid;
        if (labels[i].robust)
            ++summary.robust;
        else
            ++summary.fragile;
    }
    return summary;
}

} // namespace placegen
