#pragma once

#include <span>
#include <string>
#include <vector>

#include "placegen/mesh.hpp"
#include "placegen/sdf.hpp"

namespace placegen {

struct SimConfig {
    double dt = 1.0 / 240.0;       // s
    int total_steps = 720;         // T
    int window = 120;              // validation window, t_evp = T
    Vec3 gravity = Vec3(0, 0, -9.81);
    double contact_stiffness = 1e4; // k_n, N/m per sample
    double contact_damping = 50.0;  // c_n, N*s/m per sample
    double friction = 0.5;          // Coulomb coefficient
    double linear_damping = 0.999;  // velocity scale per step
    double angular_damping = 0.999;
    double velocity_eps = 1e-2;     // rest test, m/s and rad/s
    double stability_threshold = 1e-6; // max pose variance of a valid placement
    double skin_depth = 1e-3;       // m, contact activation band
    double penetration_tol = 1e-3;  // m, initial-overlap rejection
    double friction_vreg = 1e-3;    // m/s, Coulomb regularization velocity
    double char_length = 0.0;       // variance length scale; <=0 uses bbox diagonal
};

/// Object prepared for simulation: COM-frame surface samples and inertia.
struct Body {
    TriMesh mesh;
    std::vector<Vec3> samples;      // COM frame
    std::vector<Vec3> sample_normals;
    double mass = 0.0;
    Mat3 inertia = Mat3::Zero();    // body frame, about COM
    Mat3 inertia_inv = Mat3::Zero();
    double bbox_diagonal = 0.0;
    double max_sample_radius = 0.0; // max |sample| from COM
};

Body make_body(TriMesh mesh, std::size_t n_samples, std::uint64_t sample_seed);

struct RigidBodyState {
    Pose pose;                 // COM position + orientation, support frame
    Vec3 lin_vel = Vec3::Zero();
    Vec3 ang_vel = Vec3::Zero();
};

struct Trajectory {
    std::vector<RigidBodyState> states; // t = 0..T when the rollout completes;
                                        // shorter when rejected or aborted
    std::vector<std::uint8_t> contact;  // in_contact flag per recorded state
};

enum class RejectReason { none, overlap, moving, lost_contact, escaped };

const char* to_string(RejectReason r);
RejectReason reject_reason_from_string(const std::string& s);

struct SettleOutcome {
    bool valid = false;
    double sigma = 0.0;     // pose variance over the validation window
    double fitness = 0.0;   // -sigma
    Pose feature;           // final pose X(T)
    RejectReason reason = RejectReason::none;
    bool window_contact_ok = false;
    bool window_velocity_ok = false;
    bool window_variance_ok = false;
};

/// One semi-implicit Euler step with penalty contacts against the support SDF.
RigidBodyState step(const RigidBodyState& state, const Body& body, const SdfGrid& sdf,
                    const SimConfig& cfg);

/// Full drop-and-settle rollout from rest. Initial overlap rejects without
/// simulating; escapes below the SDF grid and numerical blowups abort early.
std::pair<Trajectory, SettleOutcome> settle(const Pose& initial, const Body& body,
                                            const SdfGrid& sdf, const SimConfig& cfg);

/// Plain rollout of n steps from an arbitrary state; no validity logic, no
/// overlap rejection. Used by the perturbation filter. A trajectory shorter
/// than n_steps + 1 signals a numerical blowup.
Trajectory rollout(const RigidBodyState& initial, int n_steps, const Body& body,
                   const SdfGrid& sdf, const SimConfig& cfg);

/// Composite pose variance over a window: positional variance over L^2 plus
/// mean squared geodesic angle to the chordal mean orientation.
double pose_variance(std::span<const Pose> window, double char_length);

/// Diagnostics: kinetic + gravitational + elastic penalty energy.
double mechanical_energy(const RigidBodyState& state, const Body& body, const SdfGrid& sdf,
                         const SimConfig& cfg, double height_datum = 0.0);

/// Diagnostics: sum of contact forces plus gravity (Newton residual).
Vec3 net_force_residual(const RigidBodyState& state, const Body& body, const SdfGrid& sdf,
                        const SimConfig& cfg);

void dump_trajectory_csv(const Trajectory& traj, double dt, const std::string& path);

} // namespace placegen
