#include "liwo/scenarios.hpp"

namespace liwo {

SimWorld benchmark_world() {
  return make_room_world(Vec3(0.0, 0.0, 1.0), Vec3(30.0, 30.0, 6.0), 4);
}

TrajectoryScript benchmark_script() {
  TrajectoryScript script;
  script.blend_time = 0.5;
  script.segments = {
      {2.0, 0.0, 0.0},    // rest for static initialization
      {8.0, 1.2, 0.0},
      {7.0, 1.0, 0.45},
      {8.0, 1.2, 0.0},
      {7.0, 1.0, 0.45},
      {8.0, 1.2, 0.0},
      {7.0, 1.0, -0.45},
      {8.0, 1.2, 0.0},
      {5.0, 0.6, 0.2},
  };
  return script;
}

TrajectoryScript straight_script() {
  TrajectoryScript script;
  script.blend_time = 0.5;
  script.segments = {
      {2.0, 0.0, 0.0},
      {8.0, 1.0, 0.0},
  };
  return script;
}

NoiseConfig nominal_noise() {
  return NoiseConfig{0.02, 0.002, 1e-4, 1e-5, 0.02};
}

SimConfig default_sim_config(const TrajectoryScript &script) {
  SimConfig config;
  config.script = script;
  config.imu_rate = 200.0;
  config.wheel_rate = 200.0;
  config.wheel_geometry = WheelGeometry{0.15, 0.15};
  config.track_width = 0.5;
  return config;
}

}  // namespace liwo
