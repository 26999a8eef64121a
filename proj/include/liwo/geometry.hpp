#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace liwo {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;  // Hamilton convention, body-to-world in states

// Project-wide quaternion conventions:
//  * Hamilton product, storage via Eigen (w last in memory, (w,x,y,z) in ctor).
//  * State quaternions rotate body-frame vectors into the world frame.
//  * All public functions return normalized quaternions.

inline Quat normalized(const Quat &q) { return q.normalized(); }

// q and -q encode the same rotation.
bool rotationally_equal(const Quat &a, const Quat &b, double tol = 1e-9);

// Angle of the relative rotation between two quaternions, in [0, pi].
double rotation_angle(const Quat &a, const Quat &b);

Mat3 skew(const Vec3 &v);

// Exponential map of so(3): rotation by |phi| about phi/|phi|.
// Taylor fallback below 1e-8 rad.
Quat so3_exp(const Vec3 &phi);

// Logarithm map, inverse of so3_exp on the |phi| < pi branch.
Vec3 so3_log(const Quat &q);

// Right and left Jacobians of SO(3) and their inverses.
Mat3 so3_right_jacobian(const Vec3 &phi);
Mat3 so3_left_jacobian(const Vec3 &phi);
Mat3 so3_right_jacobian_inverse(const Vec3 &phi);
Mat3 so3_left_jacobian_inverse(const Vec3 &phi);

// 4x4 Hamilton product matrices with (w, x, y, z) component ordering:
// quat_to_vec4(a ⊗ b) = left_product_matrix(a) * quat_to_vec4(b)
//                      = right_product_matrix(b) * quat_to_vec4(a)
Eigen::Vector4d quat_to_vec4(const Quat &q);
Eigen::Matrix4d left_product_matrix(const Quat &q);
Eigen::Matrix4d right_product_matrix(const Quat &q);

// Spherical linear interpolation along the shorter arc. alpha in [0, 1].
Quat slerp(const Quat &q0, const Quat &q1, double alpha);

// Full platform state at one instant (Hamilton q, world-frame t and v).
struct NavState {
  Vec3 t = Vec3::Zero();        // translation, m, world frame
  Quat q = Quat::Identity();    // body-to-world
  Vec3 v = Vec3::Zero();        // velocity, m/s, world frame
  Vec3 b_a = Vec3::Zero();      // accelerometer bias, m/s^2
  Vec3 b_w = Vec3::Zero();      // gyroscope bias, rad/s
  double stamp = 0.0;           // s

  NavState() = default;
  NavState(const Vec3 &t_, const Quat &q_, const Vec3 &v_, const Vec3 &ba,
           const Vec3 &bw, double stamp_);
};

// Begin/end states parameterizing one sweep; begin.stamp < end.stamp.
struct SweepStatePair {
  NavState begin;
  NavState end;

  SweepStatePair() = default;
  SweepStatePair(NavState b, NavState e);
};

// Fixed sensor placements: LiDAR-to-IMU and odometer-to-IMU.
struct Extrinsics {
  Quat q_lidar_body = Quat::Identity();
  Vec3 t_lidar_body = Vec3::Zero();
  Quat q_odom_body = Quat::Identity();
  Vec3 t_odom_body = Vec3::Zero();

  Vec3 lidar_to_body(const Vec3 &p) const { return q_lidar_body * p + t_lidar_body; }
};

// State at t_p from the begin/end pair: linear blend of t, v and biases,
// slerp for the attitude.
NavState interpolate_state(const SweepStatePair &pair, double t_p);

}  // namespace liwo
