#pragma once

#include <vector>

#include "liwo/geometry.hpp"

namespace liwo {

struct ImuSample {
  double stamp = 0.0;        // s
  Vec3 gyro = Vec3::Zero();  // rad/s, body frame
  Vec3 accel = Vec3::Zero(); // m/s^2, body frame (specific force + gravity term)
};

struct WheelSample {
  double stamp = 0.0;     // s
  double tau_left = 0.0;  // rad/s shaft speed
  double tau_right = 0.0; // rad/s shaft speed
};

struct WheelGeometry {
  double r_left = 0.1;   // m
  double r_right = 0.1;  // m
};

// Per-axis noise densities used by both the simulator and the estimator.
struct NoiseConfig {
  double sigma_a = 0.0;    // accel white noise, m/s^2
  double sigma_w = 0.0;    // gyro white noise, rad/s
  double sigma_ba = 0.0;   // accel bias random walk, m/s^2/sqrt(s)
  double sigma_bw = 0.0;   // gyro bias random walk, rad/s/sqrt(s)
  double sigma_v = 0.0;    // per-wheel linear speed noise, m/s
};

// Non-holonomic wheel odometer model: mean of the two rear wheel rim speeds
// along the forward axis, zero lateral and vertical components.
Vec3 wheel_linear_velocity(const WheelSample &s, const WheelGeometry &g);

// One fused high-rate sample: IMU reading plus the wheel velocity
// time-interpolated to the IMU stamp (odometer frame).
struct ImuOdomSample {
  double stamp = 0.0;
  Vec3 gyro = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
  Vec3 v_odom = Vec3::Zero();  // m/s, odometer frame
};

// Merges the IMU stream with wheel velocities (linearly interpolated to IMU
// stamps) over [t0, t1]. Requires IMU samples at or spanning both endpoints;
// throws GapError when consecutive kept samples are more than `max_gap` apart.
std::vector<ImuOdomSample> fuse_imu_wheel(const std::vector<ImuSample> &imu,
                                          const std::vector<WheelSample> &wheel,
                                          const WheelGeometry &geometry,
                                          double t0, double t1,
                                          double max_gap = 0.05);

}  // namespace liwo
