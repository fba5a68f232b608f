#include "placegen/sim.hpp"

#include <cmath>
#include <fstream>

#include "placegen/error.hpp"

namespace placegen {

namespace {

constexpr double kBlowupLimit = 1e6;

struct ContactPoint {
    Vec3 force;
    Vec3 offset; // contact point minus COM
};

struct ContactResult {
    Vec3 force = Vec3::Zero();
    Vec3 torque = Vec3::Zero();
    bool in_contact = false;
};

/// Per-sample conservative lower bounds on the SDF value; lets quiescent
/// samples skip grid lookups without changing any computed force.
struct ContactCache {
    std::vector<double> value_at_query;
    std::vector<double> motion_at_query;
    double accumulated_motion = 0.0;
    double lipschitz = 2.0;

    void reset(std::size_t n) {
        value_at_query.assign(n, -std::numeric_limits<double>::infinity());
        motion_at_query.assign(n, 0.0);
        accumulated_motion = 0.0;
    }
};

// Shared force evaluation; identical arithmetic with or without the cache.
ContactResult contact_forces(const RigidBodyState& s, const Body& body, const SdfGrid& sdf,
                             const SimConfig& cfg, ContactCache* cache) {
    ContactResult out;
    const Vec3& x = s.pose.position;
    const Quat& q = s.pose.orientation;
    const double skin = cfg.skin_depth;

    std::vector<ContactPoint> normal_part;
    std::vector<std::pair<Vec3, double>> tangential; // (velocity, viscous coeff), same order
    std::vector<Vec3> tangential_offset;
    double coeff_sum = 0.0;

    for (std::size_t i = 0; i < body.samples.size(); ++i) {
        if (cache) {
            const double bound = cache->value_at_query[i] -
                                 cache->lipschitz *
                                     (cache->accumulated_motion - cache->motion_at_query[i]);
            if (bound > skin + 1e-9) continue;
        }
        const Vec3 p = q * body.samples[i] + x;
        const double phi = sdf.value(p);
        if (cache) {
            cache->value_at_query[i] = phi;
            cache->motion_at_query[i] = cache->accumulated_motion;
        }
        if (phi >= skin) continue;

        out.in_contact = true;
        const double depth = skin - phi;
        Vec3 n = sdf.gradient(p);
        const double nn = n.norm();
        n = (nn > 1e-12) ? Vec3(n / nn) : Vec3(0, 0, 1);

        const Vec3 offset = p - x;
        const Vec3 vel = s.lin_vel + s.ang_vel.cross(offset);
        const double vn = vel.dot(n);
        const double fn = std::max(0.0, cfg.contact_stiffness * depth + cfg.contact_damping * (-vn));
        normal_part.push_back({fn * n, offset});

        const Vec3 vt = vel - vn * n;
        const double speed = vt.norm();
        const double coeff = cfg.friction * fn / std::max(speed, cfg.friction_vreg);
        tangential.emplace_back(vt, coeff);
        tangential_offset.push_back(offset);
        coeff_sum += coeff;
    }

    // Cap the aggregate friction viscosity so the tangential impulse cannot
    // reverse the contact velocity within one step.
    double scale = 1.0;
    const double coeff_limit = 0.5 * body.mass / cfg.dt;
    if (coeff_sum > coeff_limit) scale = coeff_limit / coeff_sum;

    for (std::size_t i = 0; i < normal_part.size(); ++i) {
        const Vec3 f = normal_part[i].force - scale * tangential[i].second * tangential[i].first;
        out.force += f;
        out.torque += normal_part[i].offset.cross(f);
    }
    return out;
}

RigidBodyState integrate(const RigidBodyState& s, const Body& body, const SimConfig& cfg,
                         const ContactResult& contact) {
    RigidBodyState next;
    const Vec3 accel = cfg.gravity + contact.force / body.mass;
    next.lin_vel = (s.lin_vel + cfg.dt * accel) * cfg.linear_damping;

    const Mat3 r = s.pose.orientation.toRotationMatrix();
    const Mat3 inertia_inv_world = r * body.inertia_inv * r.transpose();
    next.ang_vel = (s.ang_vel + cfg.dt * (inertia_inv_world * contact.torque)) * cfg.angular_damping;

    next.pose.position = s.pose.position + cfg.dt * next.lin_vel;
    const double w = next.ang_vel.norm();
    if (w * cfg.dt > 1e-12) {
        next.pose.orientation =
            (Quat(Eigen::AngleAxisd(w * cfg.dt, next.ang_vel / w)) * s.pose.orientation)
                .normalized();
    } else {
        next.pose.orientation = s.pose.orientation.normalized();
    }
    return next;
}

bool blown_up(const RigidBodyState& s) {
    auto bad = [](const Vec3& v) {
        return !v.allFinite() || v.cwiseAbs().maxCoeff() > kBlowupLimit;
    };
    return bad(s.pose.position) || bad(s.lin_vel) || bad(s.ang_vel) ||
           !s.pose.orientation.coeffs().allFinite();
}

} // namespace

Body make_body(TriMesh mesh, std::size_t n_samples, std::uint64_t sample_seed) {
    Body b;
    const SurfaceSamples raw = sample_surface(mesh, n_samples, sample_seed);
    b.samples.reserve(raw.points.size());
    for (const Vec3& p : raw.points) b.samples.push_back(p - mesh.com);
    b.sample_normals = raw.normals;
    b.mass = mesh.mass;
    b.inertia = mesh.inertia;
    b.inertia_inv = mesh.inertia.inverse();
    b.bbox_diagonal = mesh.bbox.diagonal();
    b.max_sample_radius = 0.0;
    for (const Vec3& p : b.samples)
        b.max_sample_radius = std::max(b.max_sample_radius, p.norm());
    b.mesh = std::move(mesh);
    if (b.mass <= 0.0) throw Error("make_body: non-positive mass (open or inverted mesh?)");
    return b;
}

const char* to_string(RejectReason r) {
    switch (r) {
        case RejectReason::none: return "none";
        case RejectReason::overlap: return "overlap";
        case RejectReason::moving: return "moving";
        case RejectReason::lost_contact: return "lost_contact";
        case RejectReason::escaped: return "escaped";
    }
    return "none";
}

RejectReason reject_reason_from_string(const std::string& s) {
    if (s == "overlap") return RejectReason::overlap;
    if (s == "moving") return RejectReason::moving;
    if (s == "lost_contact") return RejectReason::lost_contact;
    if (s == "escaped") return RejectReason::escaped;
    if (s == "none") return RejectReason::none;
    throw CorruptFile("unknown rejection reason '" + s + "'");
}

RigidBodyState step(const RigidBodyState& state, const Body& body, const SdfGrid& sdf,
                    const SimConfig& cfg) {
    const ContactResult contact = contact_forces(state, body, sdf, cfg, nullptr);
    return integrate(state, body, cfg, contact);
}

namespace {

struct RolloutControl {
    bool record_contact = true;
    bool allow_early_escape = true;
};

enum class RolloutEnd { completed, blowup, below_grid };

RolloutEnd run_rollout(const RigidBodyState& initial, int n_steps, const Body& body,
                       const SdfGrid& sdf, const SimConfig& cfg, Trajectory& traj,
                       const RolloutControl& ctl) {
    static thread_local ContactCache cache;
    cache.reset(body.samples.size());
    cache.lipschitz = sdf.lipschitz;

    RigidBodyState s = initial;
    s.pose.normalize();

    traj.states.clear();
    traj.contact.clear();
    traj.states.reserve(n_steps + 1);
    traj.contact.reserve(n_steps + 1);

    const double grid_floor = sdf.grid_box().lo.z();

    // Contact flag of the recorded state t is evaluated when computing the
    // forces that advance t -> t+1; the final state gets one extra query pass.
    for (int t = 0; t < n_steps; ++t) {
        const ContactResult contact = contact_forces(s, body, sdf, cfg, &cache);
        traj.states.push_back(s);
        traj.contact.push_back(contact.in_contact ? 1 : 0);

        const RigidBodyState next = integrate(s, body, cfg, contact);
        if (blown_up(next)) return RolloutEnd::blowup;

        const double motion =
            (next.lin_vel.norm() + next.ang_vel.norm() * body.max_sample_radius) * cfg.dt;
        cache.accumulated_motion += motion;
        s = next;

        if (ctl.allow_early_escape && s.lin_vel.z() < 0.0 &&
            s.pose.position.z() + body.max_sample_radius < grid_floor - cfg.skin_depth) {
            traj.states.push_back(s);
            traj.contact.push_back(0);
            return RolloutEnd::below_grid;
        }
    }
    const ContactResult last = contact_forces(s, body, sdf, cfg, &cache);
    traj.states.push_back(s);
    traj.contact.push_back(last.in_contact ? 1 : 0);
    return RolloutEnd::completed;
}

} // namespace

Trajectory rollout(const RigidBodyState& initial, int n_steps, const Body& body,
                   const SdfGrid& sdf, const SimConfig& cfg) {
    Trajectory traj;
    RolloutControl ctl;
    ctl.allow_early_escape = false;
    run_rollout(initial, n_steps, body, sdf, cfg, traj, ctl);
    return traj;
}

std::pair<Trajectory, SettleOutcome> settle(const Pose& initial, const Body& body,
                                            const SdfGrid& sdf, const SimConfig& cfg) {
    Trajectory traj;
    SettleOutcome out;

    // Discard rule: poses that start in penetration are rejected unsimulated.
    bool overlapping = false;
    for (const Vec3& sample : body.samples) {
        Pose p = initial;
        if (sdf.value(p.apply(sample)) < -cfg.penetration_tol) {
            overlapping = true;
            break;
        }
    }
    if (overlapping) {
        RigidBodyState s0;
        s0.pose = initial;
        traj.states.push_back(s0);
        traj.contact.push_back(0);
        out.valid = false;
        out.reason = RejectReason::overlap;
        out.sigma = std::numeric_limits<double>::infinity();
        out.fitness = -out.sigma;
        out.feature = initial;
        return {std::move(traj), out};
    }

    RolloutControl ctl;
    RigidBodyState start;
    start.pose = initial;
    const RolloutEnd end = run_rollout(start, cfg.total_steps, body, sdf, cfg, traj, ctl);
    out.feature = traj.states.back().pose;

    if (end != RolloutEnd::completed) {
        out.valid = false;
        out.reason = (end == RolloutEnd::blowup) ? RejectReason::escaped
                                                 : RejectReason::lost_contact;
        out.sigma = std::numeric_limits<double>::infinity();
        out.fitness = -out.sigma;
        return {std::move(traj), out};
    }

    const int first = cfg.total_steps - cfg.window;
    out.window_contact_ok = true;
    out.window_velocity_ok = true;
    for (int t = first; t <= cfg.total_steps; ++t) {
        if (!traj.contact[t]) out.window_contact_ok = false;
        const RigidBodyState& s = traj.states[t];
        if (s.lin_vel.norm() >= cfg.velocity_eps || s.ang_vel.norm() >= cfg.velocity_eps)
            out.window_velocity_ok = false;
    }

    std::vector<Pose> window_poses;
    window_poses.reserve(cfg.window + 1);
    for (int t = first; t <= cfg.total_steps; ++t) window_poses.push_back(traj.states[t].pose);
    const double len = cfg.char_length > 0.0 ? cfg.char_length : body.bbox_diagonal;
    out.sigma = pose_variance(window_poses, len);
    out.fitness = -out.sigma;
    out.window_variance_ok = out.sigma < cfg.stability_threshold;

    out.valid = out.window_contact_ok && out.window_velocity_ok && out.window_variance_ok;
    if (out.valid)
        out.reason = RejectReason::none;
    else if (!out.window_contact_ok)
        out.reason = RejectReason::lost_contact;
    else
        out.reason = RejectReason::moving;
    return {std::move(traj), out};
}

double pose_variance(std::span<const Pose> window, double char_length) {
    if (window.size() < 2) throw WindowTooShort("pose_variance needs at least 2 poses");
    if (char_length <= 0.0) throw Error("pose_variance: char_length must be positive");

    Vec3 mean_pos = Vec3::Zero();
    for (const Pose& p : window) mean_pos += p.position;
    mean_pos /= static_cast<double>(window.size());

    std::vector<Quat> quats;
    quats.reserve(window.size());
    for (const Pose& p : window) quats.push_back(p.orientation);
    const Quat mean_q = chordal_mean(quats);

    double pos_term = 0.0, rot_term = 0.0;
    for (const Pose& p : window) {
        pos_term += (p.position - mean_pos).squaredNorm();
        const double ang = geodesic_angle(p.orientation, mean_q);
        rot_term += ang * ang;
    }
    const double n = static_cast<double>(window.size());
    return pos_term / (n * char_length * char_length) + rot_term / n;
}

double mechanical_energy(const RigidBodyState& state, const Body& body, const SdfGrid& sdf,
                         const SimConfig& cfg, double height_datum) {
    const Mat3 r = state.pose.orientation.toRotationMatrix();
    const Mat3 inertia_world = r * body.inertia * r.transpose();
    const double kinetic = 0.5 * body.mass * state.lin_vel.squaredNorm() +
                           0.5 * state.ang_vel.dot(inertia_world * state.ang_vel);
    const double potential =
        -body.mass * cfg.gravity.dot(state.pose.position - Vec3(0, 0, height_datum));
    double elastic = 0.0;
    for (const Vec3& sample : body.samples) {
        const double phi = sdf.value(state.pose.apply(sample));
        if (phi < cfg.skin_depth) {
            const double depth = cfg.skin_depth - phi;
            elastic += 0.5 * cfg.contact_stiffness * depth * depth;
        }
    }
    return kinetic + potential + elastic;
}

Vec3 net_force_residual(const RigidBodyState& state, const Body& body, const SdfGrid& sdf,
                        const SimConfig& cfg) {
    const ContactResult contact = contact_forces(state, body, sdf, cfg, nullptr);
    return contact.force + body.mass * cfg.gravity;
}

void dump_trajectory_csv(const Trajectory& traj, double dt, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError(path + ": cannot open for writing");
    out.precision(17);
    out << "t,px,py,pz,qw,qx,qy,qz,contact\n";
    for (std::size_t t = 0; t < traj.states.size(); ++t) {
        const Pose& p = traj.states[t].pose;
        out << t * dt << ',' << p.position.x() << ',' << p.position.y() << ','
            << p.position.z() << ',' << p.orientation.w() << ',' << p.orientation.x() << ','
            << p.orientation.y() << ',' << p.orientation.z() << ','
            << int(traj.contact[t]) << "\n";
    }
    if (!out) throw IoError(path + ": write failed");
}

} // namespace placegen
