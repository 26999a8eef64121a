#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "liwo/geometry.hpp"
#include "liwo/sensors.hpp"
#include "liwo/sweep.hpp"

namespace liwo {

// Deterministic Gaussian generator (explicit Box-Muller over mt19937_64 so
// output is identical across standard libraries).
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}
  double uniform();   // (0, 1]
  double gaussian();  // N(0, 1)
  Vec3 gaussian3();

 private:
  std::mt19937_64 gen_;
};

// Finite rectangular patch: center, unit normal, and two in-plane unit axes
// with half extents.
struct BoundedPlane {
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  Vec3 axis_u = Vec3::UnitX();
  Vec3 axis_v = Vec3::UnitY();
  double half_u = 1.0;
  double half_v = 1.0;
};

struct SimWorld {
  std::vector<BoundedPlane> planes;
  Vec3 g_w = Vec3(0.0, 0.0, -9.81);
  Vec3 bounds_min = Vec3(-100.0, -100.0, -100.0);
  Vec3 bounds_max = Vec3(100.0, 100.0, 100.0);
};

// Interior of an axis-aligned box centered at `center` (floor, ceiling, four
// walls) plus optional square pillars for extra structure.
SimWorld make_room_world(const Vec3 &center, const Vec3 &size, int num_pillars = 0);

// Planar ground-vehicle script: per segment a target forward speed and yaw
// rate, reached with a smoothstep ramp of `blend_time` seconds from the
// previous segment's values (from rest before the first segment).
struct TrajectorySegment {
  double duration = 1.0;   // s
  double speed = 0.0;      // m/s, forward
  double yaw_rate = 0.0;   // rad/s
};

struct TrajectoryScript {
  std::vector<TrajectorySegment> segments;
  double blend_time = 0.5;  // s
  double total_duration() const;
};

struct LidarModel {
  int rings = 16;
  int azimuth_steps = 360;       // columns per revolution
  double min_elevation_deg = -15.0;
  double max_elevation_deg = 15.0;
  double min_range = 0.3;        // m
  double max_range = 60.0;       // m
  double sweep_period = 0.1;     // s
};

struct SimConfig {
  TrajectoryScript script;
  double imu_rate = 200.0;    // Hz
  double wheel_rate = 200.0;  // Hz
  WheelGeometry wheel_geometry{0.15, 0.15};
  double track_width = 0.5;   // m, wheel separation
  Extrinsics extrinsics;      // odometer extrinsics must be identity here
  Vec3 initial_b_a = Vec3::Zero();
  Vec3 initial_b_w = Vec3::Zero();
  LidarModel lidar;
};

struct SimOutput {
  std::vector<NavState> truth;      // at IMU rate, true biases included
  std::vector<ImuSample> imu;
  std::vector<WheelSample> wheel;
  std::vector<Sweep> sweeps;        // points in the LiDAR frame
  Vec3 g_w = Vec3::Zero();
  double duration = 0.0;
};

// Analytic planar motion derived from a script: exposes speed, yaw and their
// derivatives in closed form, and integrates position with per-interval
// Gauss-Legendre quadrature split at script breakpoints.
class PlanarMotion {
 public:
  explicit PlanarMotion(const TrajectoryScript &script);

  struct Kinematics {
    double speed, speed_dot, yaw_rate, yaw;
  };
  Kinematics at(double t) const;

  // Cumulative position; `t` must not decrease between calls.
  Vec3 advance_to(double t);

 private:
  double blend_;
  std::vector<double> start_times_;   // per segment
  std::vector<double> start_yaw_;     // yaw at segment start
  std::vector<TrajectorySegment> segments_;
  double cursor_t_ = 0.0;
  Vec3 cursor_p_ = Vec3::Zero();
};

// Corrupted IMU stream together with the bias trajectories that produced it.
struct NoisyImuStream {
  std::vector<ImuSample> stream;
  std::vector<Vec3> bias_a;  // per sample
  std::vector<Vec3> bias_w;
};

// Adds bias random walks (scaled by sqrt(dt)) and white noise per the IMU
// measurement model. All sigmas zero leaves the stream unchanged.
NoisyImuStream add_measurement_noise(const std::vector<ImuSample> &clean,
                                     const NoiseConfig &noise, uint64_t seed,
                                     const Vec3 &b_a0 = Vec3::Zero(),
                                     const Vec3 &b_w0 = Vec3::Zero());

// Independent per-wheel speed noise, mapped to shaft rate through the radius.
std::vector<WheelSample> add_measurement_noise(const std::vector<WheelSample> &clean,
                                               const WheelGeometry &geometry,
                                               const NoiseConfig &noise,
                                               uint64_t seed);

// Runs the full sensor simulation. Identical (config, world, noise, seed)
// yields bit-identical output.
SimOutput simulate(const SimConfig &config, const SimWorld &world,
                   const NoiseConfig &noise, uint64_t seed);

}  // namespace liwo
