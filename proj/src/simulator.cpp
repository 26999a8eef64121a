#include "liwo/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "liwo/errors.hpp"

namespace liwo {

double Rng::uniform() {
  // (0, 1]: never returns 0, so log() below is safe.
  return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
}

double Rng::gaussian() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Vec3 Rng::gaussian3() { return Vec3(gaussian(), gaussian(), gaussian()); }

double TrajectoryScript::total_duration() const {
  double d = 0.0;
  for (const auto &seg : segments) d += seg.duration;
  return d;
}

SimWorld make_room_world(const Vec3 &center, const Vec3 &size, int num_pillars) {
  SimWorld world;
  const Vec3 h = 0.5 * size;
  auto add = [&](const Vec3 &c, const Vec3 &n, const Vec3 &u, const Vec3 &v,
                 double hu, double hv) {
    world.planes.push_back({c, n, u, v, hu, hv});
  };
  // Floor / ceiling.
  add(center - Vec3(0, 0, h.z()), Vec3::UnitZ(), Vec3::UnitX(), Vec3::UnitY(),
      h.x(), h.y());
  add(center + Vec3(0, 0, h.z()), -Vec3::UnitZ(), Vec3::UnitX(), Vec3::UnitY(),
      h.x(), h.y());
  // Walls, normals pointing inward.
  add(center + Vec3(h.x(), 0, 0), -Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ(),
      h.y(), h.z());
  add(center - Vec3(h.x(), 0, 0), Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ(),
      h.y(), h.z());
  add(center + Vec3(0, h.y(), 0), -Vec3::UnitY(), Vec3::UnitX(), Vec3::UnitZ(),
      h.x(), h.z());
  add(center - Vec3(0, h.y(), 0), Vec3::UnitY(), Vec3::UnitX(), Vec3::UnitZ(),
      h.x(), h.z());
  // Square pillars along the room diagonal, away from the center lane.
  for (int i = 0; i < num_pillars; ++i) {
    const double fx = 0.55 * h.x() * ((i % 2 == 0) ? 1.0 : -1.0);
    const double fy = 0.55 * h.y() * ((i / 2 % 2 == 0) ? 1.0 : -1.0);
    const Vec3 c = center + Vec3(fx, fy, 0.0);
    const double s = 0.4, hz = h.z();
    add(c + Vec3(s, 0, 0), Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ(), s, hz);
    add(c - Vec3(s, 0, 0), -Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ(), s, hz);
    add(c + Vec3(0, s, 0), Vec3::UnitY(), Vec3::UnitX(), Vec3::UnitZ(), s, hz);
    add(c - Vec3(0, s, 0), -Vec3::UnitY(), Vec3::UnitX(), Vec3::UnitZ(), s, hz);
  }
  world.bounds_min = center - h;
  world.bounds_max = center + h;
  return world;
}

PlanarMotion::PlanarMotion(const TrajectoryScript &script)
    : blend_(script.blend_time), segments_(script.segments) {
  if (segments_.empty())
    throw SimulationError("trajectory script has no segments");
  double t = 0.0;
  double yaw = 0.0;
  for (size_t k = 0; k < segments_.size(); ++k) {
    start_times_.push_back(t);
    start_yaw_.push_back(yaw);
    const double pw = (k == 0) ? 0.0 : segments_[k - 1].yaw_rate;
    const double cw = segments_[k].yaw_rate;
    const double dur = segments_[k].duration;
    const double b = std::min(blend_, dur);
    double dyaw = pw * b + 0.5 * (cw - pw) * b;  // integral over the ramp
    dyaw += cw * (dur - b);
    yaw += dyaw;
    t += dur;
  }
}

PlanarMotion::Kinematics PlanarMotion::at(double t) const {
  size_t k = 0;
  while (k + 1 < segments_.size() && t >= start_times_[k + 1]) ++k;
  const double ps = (k == 0) ? 0.0 : segments_[k - 1].speed;
  const double pw = (k == 0) ? 0.0 : segments_[k - 1].yaw_rate;
  const double cs = segments_[k].speed;
  const double cw = segments_[k].yaw_rate;
  const double b = std::min(blend_, segments_[k].duration);
  const double tau = std::max(0.0, t - start_times_[k]);
  Kinematics kin{};
  if (tau < b && b > 0.0) {
    const double u = tau / b;
    const double S = u * u * (3.0 - 2.0 * u);
    const double Sp = 6.0 * u * (1.0 - u) / b;
    kin.speed = ps + (cs - ps) * S;
    kin.speed_dot = (cs - ps) * Sp;
    kin.yaw_rate = pw + (cw - pw) * S;
    kin.yaw = start_yaw_[k] + pw * tau +
              (cw - pw) * b * (u * u * u - 0.5 * u * u * u * u);
  } else {
    kin.speed = cs;
    kin.speed_dot = 0.0;
    kin.yaw_rate = cw;
    kin.yaw = start_yaw_[k] + pw * b + 0.5 * (cw - pw) * b + cw * (tau - b);
  }
  return kin;
}

Vec3 PlanarMotion::advance_to(double t) {
  if (t < cursor_t_ - 1e-12)
    throw SimulationError("PlanarMotion::advance_to must move forward in time");
  // Breakpoints where speed/yaw-rate polynomials change piece.
  std::vector<double> cuts;
  for (size_t k = 0; k < segments_.size(); ++k) {
    const double s = start_times_[k];
    const double be = s + std::min(blend_, segments_[k].duration);
    if (s > cursor_t_ && s < t) cuts.push_back(s);
    if (be > cursor_t_ && be < t) cuts.push_back(be);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(t);

  // 5-point Gauss-Legendre on each smooth piece.
  static const double node[5] = {0.0, 0.5384693101056831, -0.5384693101056831,
                                 0.9061798459386640, -0.9061798459386640};
  static const double weight[5] = {0.5688888888888889, 0.4786286704993665,
                                   0.4786286704993665, 0.2369268850561891,
                                   0.2369268850561891};
  for (double cut : cuts) {
    const double a = cursor_t_;
    const double h = 0.5 * (cut - a);
    if (h <= 0.0) continue;
    const double mid = 0.5 * (a + cut);
    Vec3 delta = Vec3::Zero();
    for (int i = 0; i < 5; ++i) {
      const Kinematics kin = at(mid + h * node[i]);
      delta += weight[i] * Vec3(kin.speed * std::cos(kin.yaw),
                                kin.speed * std::sin(kin.yaw), 0.0);
    }
    cursor_p_ += h * delta;
    cursor_t_ = cut;
  }
  cursor_t_ = t;
  return cursor_p_;
}

NoisyImuStream add_measurement_noise(const std::vector<ImuSample> &clean,
                                     const NoiseConfig &noise, uint64_t seed,
                                     const Vec3 &b_a0, const Vec3 &b_w0) {
  Rng rng(seed);
  NoisyImuStream out;
  out.stream.reserve(clean.size());
  Vec3 ba = b_a0, bw = b_w0;
  double prev_stamp = clean.empty() ? 0.0 : clean.front().stamp;
  for (const ImuSample &s : clean) {
    const double dt = s.stamp - prev_stamp;
    if (dt > 0.0) {
      const double sq = std::sqrt(dt);
      ba += noise.sigma_ba * sq * rng.gaussian3();
      bw += noise.sigma_bw * sq * rng.gaussian3();
    }
    ImuSample n = s;
    n.accel += ba + noise.sigma_a * rng.gaussian3();
    n.gyro += bw + noise.sigma_w * rng.gaussian3();
    out.stream.push_back(n);
    out.bias_a.push_back(ba);
    out.bias_w.push_back(bw);
    prev_stamp = s.stamp;
  }
  return out;
}

std::vector<WheelSample> add_measurement_noise(const std::vector<WheelSample> &clean,
                                               const WheelGeometry &geometry,
                                               const NoiseConfig &noise,
                                               uint64_t seed) {
  Rng rng(seed);
  std::vector<WheelSample> out;
  out.reserve(clean.size());
  for (const WheelSample &s : clean) {
    WheelSample n = s;
    n.tau_left += noise.sigma_v * rng.gaussian() / geometry.r_left;
    n.tau_right += noise.sigma_v * rng.gaussian() / geometry.r_right;
    out.push_back(n);
  }
  return out;
}

namespace {

// Nearest in-range ray hit against the world, or miss.
bool cast_ray(const SimWorld &world, const Vec3 &origin, const Vec3 &dir,
              double min_range, double max_range, double *range_out) {
  double best = max_range + 1.0;
  for (const BoundedPlane &pl : world.planes) {
    const double denom = dir.dot(pl.normal);
    if (std::abs(denom) < 1e-12) continue;
    const double r = (pl.center - origin).dot(pl.normal) / denom;
    if (r < min_range || r > max_range || r >= best) continue;
    const Vec3 hit = origin + r * dir - pl.center;
    if (std::abs(hit.dot(pl.axis_u)) > pl.half_u) continue;
    if (std::abs(hit.dot(pl.axis_v)) > pl.half_v) continue;
    best = r;
  }
  if (best > max_range) return false;
  *range_out = best;
  return true;
}

Quat yaw_quat(double yaw) {
  return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()));
}

}  // namespace

SimOutput simulate(const SimConfig &config, const SimWorld &world,
                   const NoiseConfig &noise, uint64_t seed) {
  const Extrinsics &extr = config.extrinsics;
  if (rotation_angle(extr.q_odom_body, Quat::Identity()) > 1e-12 ||
      extr.t_odom_body.norm() > 1e-12)
    throw SimulationError(
        "simulator requires identity odometer extrinsics (wheel frame is the "
        "body frame)");
  const double g_norm = world.g_w.norm();
  if (!(g_norm >= 9.7 && g_norm <= 9.9))
    throw SimulationError("world gravity magnitude outside [9.7, 9.9]");

  SimOutput out;
  out.g_w = world.g_w;
  out.duration = config.script.total_duration();

  PlanarMotion motion(config.script);
  const int n_imu = static_cast<int>(std::llround(out.duration * config.imu_rate));
  std::vector<ImuSample> imu_clean;
  imu_clean.reserve(n_imu + 1);
  out.truth.reserve(n_imu + 1);

  auto segment_at = [&](double t) {
    double acc = 0.0;
    for (size_t k = 0; k < config.script.segments.size(); ++k) {
      acc += config.script.segments[k].duration;
      if (t < acc) return k;
    }
    return config.script.segments.size() - 1;
  };

  for (int i = 0; i <= n_imu; ++i) {
    const double t = static_cast<double>(i) / config.imu_rate;
    const Vec3 pos = motion.advance_to(t);
    const auto kin = motion.at(t);
    if ((pos.array() < world.bounds_min.array()).any() ||
        (pos.array() > world.bounds_max.array()).any())
      throw SimulationError("trajectory leaves world bounds in segment " +
                            std::to_string(segment_at(t)));
    const Quat q = yaw_quat(kin.yaw);
    const Mat3 Rt = q.toRotationMatrix().transpose();
    const double c = std::cos(kin.yaw), s = std::sin(kin.yaw);
    const Vec3 v_w(kin.speed * c, kin.speed * s, 0.0);
    const Vec3 a_w(kin.speed_dot * c - kin.speed * kin.yaw_rate * s,
                   kin.speed_dot * s + kin.speed * kin.yaw_rate * c, 0.0);
    ImuSample m;
    m.stamp = t;
    m.gyro = Vec3(0.0, 0.0, kin.yaw_rate);
    m.accel = Rt * a_w + Rt * world.g_w;
    imu_clean.push_back(m);
    out.truth.emplace_back(pos, q, v_w, Vec3::Zero(), Vec3::Zero(), t);
  }

  const int n_wheel = static_cast<int>(std::llround(out.duration * config.wheel_rate));
  std::vector<WheelSample> wheel_clean;
  wheel_clean.reserve(n_wheel + 1);
  for (int i = 0; i <= n_wheel; ++i) {
    const double t = static_cast<double>(i) / config.wheel_rate;
    const auto kin = motion.at(t);
    const double v_left = kin.speed - 0.5 * kin.yaw_rate * config.track_width;
    const double v_right = kin.speed + 0.5 * kin.yaw_rate * config.track_width;
    wheel_clean.push_back(
        {t, v_left / config.wheel_geometry.r_left,
         v_right / config.wheel_geometry.r_right});
  }

  NoisyImuStream noisy = add_measurement_noise(
      imu_clean, noise, seed ^ 0x9e3779b97f4a7c15ull, config.initial_b_a,
      config.initial_b_w);
  out.imu = std::move(noisy.stream);
  for (size_t i = 0; i < out.truth.size(); ++i) {
    out.truth[i].b_a = noisy.bias_a[i];
    out.truth[i].b_w = noisy.bias_w[i];
  }
  out.wheel = add_measurement_noise(wheel_clean, config.wheel_geometry, noise,
                                    seed ^ 0xd1b54a32d192ed03ull);

  // LiDAR pass with its own position integrator (point stamps are off the
  // IMU grid).
  PlanarMotion lidar_motion(config.script);
  const LidarModel &lm = config.lidar;
  const Mat3 R_lo = extr.q_lidar_body.toRotationMatrix();
  const int n_sweeps = static_cast<int>(out.duration / lm.sweep_period + 1e-9);
  std::vector<double> elev(lm.rings), cos_e(lm.rings), sin_e(lm.rings);
  for (int r = 0; r < lm.rings; ++r) {
    const double frac = (lm.rings == 1) ? 0.5
                                        : static_cast<double>(r) / (lm.rings - 1);
    elev[r] = (lm.min_elevation_deg +
               frac * (lm.max_elevation_deg - lm.min_elevation_deg)) *
              M_PI / 180.0;
    cos_e[r] = std::cos(elev[r]);
    sin_e[r] = std::sin(elev[r]);
  }
  out.sweeps.reserve(n_sweeps);
  for (int k = 0; k < n_sweeps; ++k) {
    Sweep sweep;
    sweep.index = k;
    sweep.t_b = k * lm.sweep_period;
    sweep.t_e = (k + 1) * lm.sweep_period;
    sweep.points.reserve(lm.rings * lm.azimuth_steps);
    for (int j = 0; j < lm.azimuth_steps; ++j) {
      const double t = sweep.t_b + lm.sweep_period * j / lm.azimuth_steps;
      const Vec3 pos = lidar_motion.advance_to(t);
      const auto kin = lidar_motion.at(t);
      const Mat3 R_wb = yaw_quat(kin.yaw).toRotationMatrix();
      const Vec3 origin_w = pos + R_wb * extr.t_lidar_body;
      const double az = 2.0 * M_PI * j / lm.azimuth_steps;
      const double ca = std::cos(az), sa = std::sin(az);
      for (int r = 0; r < lm.rings; ++r) {
        const Vec3 dir_l(cos_e[r] * ca, cos_e[r] * sa, sin_e[r]);
        const Vec3 dir_w = R_wb * (R_lo * dir_l);
        double range;
        if (!cast_ray(world, origin_w, dir_w, lm.min_range, lm.max_range, &range))
          continue;
        sweep.points.push_back({range * dir_l, t});
      }
    }
    out.sweeps.push_back(std::move(sweep));
  }
  return out;
}

}  // namespace liwo
