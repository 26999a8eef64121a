#pragma once

#include "liwo/simulator.hpp"

namespace liwo {

// Canned scenarios shared by the CLI and the test harness.

// Rectangular room with four pillars, sized for the benchmark loop.
SimWorld benchmark_world();

// 60 s loop: initial rest, straights and alternating arcs.
TrajectoryScript benchmark_script();

// Short run whose post-rest motion is a constant-velocity straight, so the
// begin/end interpolation is exact between blends.
TrajectoryScript straight_script();

// Nominal sensor noise levels (per-sample standard deviations).
NoiseConfig nominal_noise();

SimConfig default_sim_config(const TrajectoryScript &script);

}  // namespace liwo
