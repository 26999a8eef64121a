#pragma once

#include <vector>

#include "liwo/geometry.hpp"
#include "liwo/sensors.hpp"

namespace liwo {

struct InitResult {
  Vec3 g_w = Vec3(0.0, 0.0, -9.81);
  Vec3 b_a = Vec3::Zero();
  Vec3 b_w = Vec3::Zero();
  Quat q0 = Quat::Identity();  // gravity-aligned, zero yaw
  Vec3 v0 = Vec3::Zero();      // exactly zero
};

struct StaticInitConfig {
  double window = 1.0;              // s of samples to use
  double max_gyro_std = 0.02;       // rad/s, per-axis stationarity gate
  double max_wheel_speed = 0.01;    // m/s, on the windowed mean
  double gravity_magnitude = 9.81;  // m/s^2, fixed; direction from data
};

// Estimates gyro bias, attitude and accel bias from a stationary window at
// the start of both streams. Throws InitializationRejected when the
// stationarity gates fail, naming the violated statistic.
InitResult static_initialize(const std::vector<ImuSample> &imu,
                             const std::vector<WheelSample> &wheel,
                             const WheelGeometry &geometry,
                             const StaticInitConfig &config);

}  // namespace liwo
