#include "liwo/initialization.hpp"

#include <cmath>

#include "liwo/errors.hpp"

namespace liwo {

InitResult static_initialize(const std::vector<ImuSample> &imu,
                             const std::vector<WheelSample> &wheel,
                             const WheelGeometry &geometry,
                             const StaticInitConfig &config) {
  if (imu.size() < 2)
    throw InitializationRejected("fewer than two IMU samples");
  const double t0 = imu.front().stamp;
  const double t_end = t0 + config.window;

  Vec3 gyro_mean = Vec3::Zero(), accel_mean = Vec3::Zero();
  size_t n = 0;
  for (const ImuSample &s : imu) {
    if (s.stamp > t_end) break;
    gyro_mean += s.gyro;
    accel_mean += s.accel;
    ++n;
  }
  if (n < 2 || imu[n - 1].stamp - t0 < 0.5 - 1e-9)
    throw InitializationRejected("stationary window shorter than 0.5 s");
  gyro_mean /= static_cast<double>(n);
  accel_mean /= static_cast<double>(n);

  Vec3 gyro_var = Vec3::Zero();
  for (size_t i = 0; i < n; ++i)
    gyro_var += (imu[i].gyro - gyro_mean).cwiseAbs2();
  const Vec3 gyro_std = (gyro_var / static_cast<double>(n)).cwiseSqrt();
  if ((gyro_std.array() >= config.max_gyro_std).any())
    throw InitializationRejected("gyro std " + std::to_string(gyro_std.maxCoeff()) +
                                 " rad/s exceeds " +
                                 std::to_string(config.max_gyro_std));

  double wheel_mean = 0.0;
  size_t n_wheel = 0;
  for (const WheelSample &s : wheel) {
    if (s.stamp > t_end) break;
    wheel_mean += wheel_linear_velocity(s, geometry).x();
    ++n_wheel;
  }
  if (n_wheel > 0) wheel_mean /= static_cast<double>(n_wheel);
  if (std::abs(wheel_mean) >= config.max_wheel_speed)
    throw InitializationRejected("mean wheel speed " + std::to_string(wheel_mean) +
                                 " m/s exceeds " +
                                 std::to_string(config.max_wheel_speed));

  const double mag = accel_mean.norm();
  if (mag < 0.9 * config.gravity_magnitude || mag > 1.1 * config.gravity_magnitude)
    throw InitializationRejected("mean accel magnitude " + std::to_string(mag) +
                                 " m/s^2 far from gravity");

  InitResult out;
  out.g_w = Vec3(0.0, 0.0, -config.gravity_magnitude);
  out.b_w = gyro_mean;
  out.v0 = Vec3::Zero();

  // Minimal (yaw-free) rotation taking the measured gravity direction onto
  // the world down axis.
  const Vec3 u = accel_mean.normalized();
  const Vec3 d = out.g_w.normalized();
  const Vec3 axis = u.cross(d);
  const double sin_a = axis.norm();
  const double cos_a = u.dot(d);
  if (sin_a < 1e-12) {
    out.q0 = cos_a > 0.0 ? Quat::Identity()
                         : Quat(Eigen::AngleAxisd(M_PI, Vec3::UnitX()));
  } else {
    out.q0 = so3_exp(axis / sin_a * std::atan2(sin_a, cos_a));
  }
  out.b_a = accel_mean - out.q0.conjugate() * out.g_w;
  return out;
}

}  // namespace liwo
