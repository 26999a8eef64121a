#include "liwo/sensors.hpp"

#include <algorithm>
#include <cmath>

#include "liwo/errors.hpp"

namespace liwo {

Vec3 wheel_linear_velocity(const WheelSample &s, const WheelGeometry &g) {
  if (!(g.r_left > 0.0 && g.r_right > 0.0))
    throw ContractError("wheel_linear_velocity: radii must be positive");
  return Vec3(0.5 * (s.tau_left * g.r_left + s.tau_right * g.r_right), 0.0, 0.0);
}

namespace {

ImuSample lerp_imu(const ImuSample &a, const ImuSample &b, double t) {
  const double u = (t - a.stamp) / (b.stamp - a.stamp);
  ImuSample out;
  out.stamp = t;
  out.gyro = (1.0 - u) * a.gyro + u * b.gyro;
  out.accel = (1.0 - u) * a.accel + u * b.accel;
  return out;
}

// Wheel velocity at time t, linearly interpolated, clamped at stream ends.
Vec3 wheel_velocity_at(const std::vector<WheelSample> &wheel,
                       const WheelGeometry &geometry, double t) {
  if (wheel.empty()) throw ContractError("fuse_imu_wheel: empty wheel stream");
  if (t <= wheel.front().stamp)
    return wheel_linear_velocity(wheel.front(), geometry);
  if (t >= wheel.back().stamp)
    return wheel_linear_velocity(wheel.back(), geometry);
  auto it = std::lower_bound(
      wheel.begin(), wheel.end(), t,
      [](const WheelSample &s, double stamp) { return s.stamp < stamp; });
  const WheelSample &hi = *it;
  const WheelSample &lo = *(it - 1);
  const double u = (t - lo.stamp) / (hi.stamp - lo.stamp);
  return (1.0 - u) * wheel_linear_velocity(lo, geometry) +
         u * wheel_linear_velocity(hi, geometry);
}

}  // namespace

std::vector<ImuOdomSample> fuse_imu_wheel(const std::vector<ImuSample> &imu,
                                          const std::vector<WheelSample> &wheel,
                                          const WheelGeometry &geometry,
                                          double t0, double t1, double max_gap) {
  constexpr double kStampTol = 1e-9;
  if (!(t0 < t1)) throw ContractError("fuse_imu_wheel: t0 must precede t1");
  if (imu.size() < 2) throw GapError("fuse_imu_wheel: not enough IMU samples");
  if (imu.front().stamp > t0 + kStampTol || imu.back().stamp < t1 - kStampTol)
    throw GapError("fuse_imu_wheel: IMU stream does not cover [" +
                   std::to_string(t0) + ", " + std::to_string(t1) + "]");

  // Boundary samples at exactly t0 and t1, interior samples verbatim.
  std::vector<ImuSample> kept;
  auto sample_at = [&](double t) -> ImuSample {
    auto it = std::lower_bound(
        imu.begin(), imu.end(), t,
        [](const ImuSample &s, double stamp) { return s.stamp < stamp; });
    if (it != imu.end() && std::abs(it->stamp - t) < kStampTol) {
      ImuSample s = *it;
      s.stamp = t;
      return s;
    }
    if (it == imu.begin() || it == imu.end())
      throw GapError("fuse_imu_wheel: no IMU bracket at " + std::to_string(t));
    return lerp_imu(*(it - 1), *it, t);
  };
  kept.push_back(sample_at(t0));
  for (const ImuSample &s : imu)
    if (s.stamp > t0 + kStampTol && s.stamp < t1 - kStampTol) kept.push_back(s);
  kept.push_back(sample_at(t1));

  std::vector<ImuOdomSample> out;
  out.reserve(kept.size());
  double prev = -1.0;
  for (const ImuSample &s : kept) {
    if (!out.empty()) {
      if (s.stamp <= prev)
        throw OrderingError("fuse_imu_wheel: non-monotonic IMU stamps");
      if (s.stamp - prev > max_gap)
        throw GapError("fuse_imu_wheel: IMU gap of " +
                       std::to_string(s.stamp - prev) + " s ending at " +
                       std::to_string(s.stamp));
    }
    ImuOdomSample f;
    f.stamp = s.stamp;
    f.gyro = s.gyro;
    f.accel = s.accel;
    f.v_odom = wheel_velocity_at(wheel, geometry, s.stamp);
    out.push_back(f);
    prev = s.stamp;
  }
  return out;
}

}  // namespace liwo
