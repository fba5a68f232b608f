#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <vector>

#include "placegen/rng.hpp"

namespace placegen {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// Rigid transform: world = orientation * local + position.
struct Pose {
    Vec3 position = Vec3::Zero();
    Quat orientation = Quat::Identity();

    Vec3 apply(const Vec3& p) const { return orientation * p + position; }

    Pose inverse() const {
        Pose inv;
        inv.orientation = orientation.conjugate();
        inv.position = -(inv.orientation * position);
        return inv;
    }

    Pose compose(const Pose& rhs) const {
        Pose out;
        out.orientation = (orientation * rhs.orientation).normalized();
        out.position = orientation * rhs.position + position;
        return out;
    }

    void normalize() { orientation.normalize(); }

    static Pose identity() { return Pose{}; }
};

// Geodesic angle between two unit quaternions, in [0, pi].
inline double geodesic_angle(const Quat& a, const Quat& b) {
    const Quat d = a.conjugate() * b;
    const double vec = d.vec().norm();
    const double w = std::abs(d.w());
    return 2.0 * std::atan2(vec, w);
}

// Sign-aligned chordal mean: align every quaternion with the first, take the
// arithmetic mean of the coefficients, renormalize. Falls back to the first
// element when the mean is numerically null (antipodal inputs).
inline Quat chordal_mean(const std::vector<Quat>& qs) {
    Eigen::Vector4d acc = Eigen::Vector4d::Zero();
    const Quat& ref = qs.front();
    for (const Quat& q : qs) {
        const double sign = (ref.coeffs().dot(q.coeffs()) < 0.0) ? -1.0 : 1.0;
        acc += sign * q.coeffs();
    }
    const double n = acc.norm();
    if (n < 1e-9) return ref;
    acc /= n;
    return Quat(acc(3), acc(0), acc(1), acc(2));
}

// Uniform rotation (Shoemake subgroup method).
inline Quat uniform_quaternion(Rng& rng) {
    const double u1 = rng.uniform01();
    const double u2 = rng.uniform01();
    const double u3 = rng.uniform01();
    const double two_pi = 6.283185307179586476925286766559;
    const double a = std::sqrt(1.0 - u1);
    const double b = std::sqrt(u1);
    return Quat(a * std::sin(two_pi * u2), a * std::cos(two_pi * u2),
                b * std::sin(two_pi * u3), b * std::cos(two_pi * u3));
}

// Intrinsic XYZ Euler angles: R = Rx(roll) * Ry(pitch) * Rz(yaw).
inline Quat quat_from_euler_xyz(double roll, double pitch, double yaw) {
    return Quat(Eigen::AngleAxisd(roll, Vec3::UnitX()) *
                Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
}

/// Inverse of quat_from_euler_xyz: roll/yaw in [-pi, pi], pitch in
/// [-pi/2, pi/2]. At the pitch singularity yaw is set to 0.
inline Vec3 euler_xyz_from_quat(const Quat& q) {
    const Mat3 r = q.toRotationMatrix();
    const double sp = std::clamp(r(0, 2), -1.0, 1.0);
    const double pitch = std::asin(sp);
    double roll, yaw;
    if (std::abs(sp) > 1.0 - 1e-12) {
        roll = std::atan2(r(2, 1), r(1, 1));
        yaw = 0.0;
    } else {
        roll = std::atan2(-r(1, 2), r(2, 2));
        yaw = std::atan2(-r(0, 1), r(0, 0));
    }
    return Vec3(roll, pitch, yaw);
}

// Wrap an angle into [-pi, pi).
inline double wrap_angle(double a) {
    const double two_pi = 6.283185307179586476925286766559;
    double w = std::fmod(a + 3.14159265358979323846, two_pi);
    if (w < 0.0) w += two_pi;
    return w - 3.14159265358979323846;
}

} // namespace placegen
