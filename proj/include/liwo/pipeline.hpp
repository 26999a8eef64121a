#pragma once

#include <string>
#include <vector>

#include "liwo/ate.hpp"
#include "liwo/initialization.hpp"
#include "liwo/optimizer.hpp"
#include "liwo/sensors.hpp"

namespace liwo {

enum class Mode { kLiwo, kLio, kLidarOnly };

Mode mode_from_string(const std::string &name);  // "liwo" | "lio" | "lidar-only"
std::string mode_to_string(Mode mode);

struct PipelineConfig {
  SolverConfig solver;
  // Estimator-side noise model feeding the pre-integration covariance.
  NoiseConfig noise{0.02, 0.002, 1e-4, 1e-5, 0.02};
  StaticInitConfig init;
  Extrinsics extrinsics;
  WheelGeometry wheel_geometry{0.15, 0.15};
  Mode mode = Mode::kLiwo;
  double downsample_voxel = 0.5;  // m
  double map_voxel = 1.0;         // m
  double prune_radius = 150.0;    // m
  double max_sample_gap = 0.05;   // s, fused-stream continuity gate
};

struct SweepResult {
  int index = 0;
  SweepStatePair states;
  ResidualReport report;
  bool optimized = false;  // first sweep and flagged sweeps keep the prediction
  bool flagged = false;
  std::string flag_reason;
  double optimize_ms = 0.0;
  double register_ms = 0.0;
  double total_ms = 0.0;
};

struct PipelineResult {
  InitResult init;
  std::vector<SweepResult> sweeps;
  std::vector<TrajectoryRecord> trajectory;  // optimized end state per sweep
  std::vector<Vec3> map_points;              // final map snapshot
};

// Full odometry run: static initialization on the leading stationary window,
// then per sweep fuse / pre-integrate / predict / down-sample / optimize /
// register / prune. Degenerate or stalled sweeps fall back to the prediction
// and are flagged; gap and ordering errors abort the run.
PipelineResult run_pipeline(const std::vector<ImuSample> &imu,
                            const std::vector<WheelSample> &wheel,
                            const std::vector<Sweep> &sweeps,
                            const PipelineConfig &config);

// RMSE of the per-sweep end-state velocity against the nearest ground-truth
// state (association window `max_stamp_gap`).
double velocity_rmse(const std::vector<SweepResult> &sweeps,
                     const std::vector<NavState> &truth,
                     double max_stamp_gap = 0.01);

}  // namespace liwo
