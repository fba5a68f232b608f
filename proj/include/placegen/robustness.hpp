#pragma once

#include "placegen/archive.hpp"
#include "placegen/space.hpp"

namespace placegen {

struct DrConfig {
    int trials = 10;                   // M
    int resettle_steps = 240;          // extra settling steps per trial
    double variance_threshold = 1e-4;  // sigma_DR
    double translation_frac = 0.02;    // of the object bbox diagonal
    double rotation_mag = 0.08726646259971647; // 5 deg
    double same_pose_pos_frac = 0.05;  // "re-settled to the same pose" tolerance
    double same_pose_angle = 0.2;      // rad
    std::uint64_t seed = 0;
    // Alternative perturbation: an impulse scaled by mass (dv = J / m) applied
    // as an initial velocity instead of a pose offset.
    bool mass_scaled_impulse = false;
    double impulse_magnitude = 0.01;   // N*s
};

struct RobustLabel {
    bool robust = false;
    std::vector<double> trial_sigmas;        // one per trial
    double worst_sigma = 0.0;
    std::vector<double> deviation_pos;       // final pose offset from X(T), m
    std::vector<double> deviation_angle;     // rad
    std::vector<std::uint8_t> same_pose;     // within the configured tolerance
};

/// Exactly one of the six pose axes perturbed, uniform axis and sign.
Pose perturb_pose(const Pose& pose, const DrConfig& cfg, double bbox_diagonal, Rng& rng);

/// M perturb-and-resettle trials from the elite's final pose. Robust iff
/// every trial variance stays below the threshold. Deterministic per rng
/// state; trials consume the stream in order so a shorter run is a prefix.
RobustLabel dr_filter(const Elite& elite, const Scenario& sc, const DrConfig& cfg, Rng rng);

struct LabelSummary {
    std::int64_t total = 0;
    std::int64_t valid = 0;
    std::int64_t robust = 0;
    std::int64_t fragile = 0;
};

/// Labels every elite in place; per-elite rng streams are derived from
/// (cfg.seed, cell index) so labels are independent of iteration order.
LabelSummary label_archive(Archive& archive, const Scenario& sc, const DrConfig& cfg,
                           int threads);

} // namespace placegen
