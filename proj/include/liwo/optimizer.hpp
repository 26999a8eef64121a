#pragma once

#include <vector>

#include "liwo/residuals.hpp"
#include "liwo/voxel_map.hpp"

namespace liwo {

struct SolverConfig {
  int max_outer_iterations = 5;    // plane re-association rounds
  int max_inner_iterations = 10;   // damped Gauss-Newton steps per round
  double update_norm_threshold = 1e-4;

  // Point-to-plane weighting: residual variance P_L (m^2) and Huber
  // threshold on the whitened residual.
  double point_variance = 0.001;
  double huber_point = 1.58;       // ~= 0.05 m raw
  double huber_block = 5.0;        // on whitened block norms

  // Diagonal weights for the velocity and consistency residuals (1/std).
  double velocity_weight = 1.0 / 0.05;
  double consistency_t_weight = 1.0 / 0.01;
  double consistency_q_weight = 1.0 / 0.005;
  double consistency_v_weight = 1.0 / 0.05;
  double consistency_b_weight = 1.0 / 0.001;

  // Plane association gates.
  int max_neighbors = 20;
  int min_neighbors = 5;
  double min_planarity = 0.1;
  double max_plane_rms = 0.02;     // m; exact-plane worlds sit far below this
  int min_valid_points = 30;

  // Levenberg-style damping.
  double lambda_init = 1e-6;
  double lambda_max = 1e8;

  // Diagonal floor added to the pre-integration covariance before inversion.
  double preint_info_floor = 1e-8;

  // Residual family switches (full system = both true; LIO = wheel off;
  // lidar-only = both off).
  bool use_imu_residual = true;
  bool use_wheel_residual = true;
};

struct ResidualReport {
  double point_cost = 0.0;        // sum of squared weighted point residuals
  double imu_cost = 0.0;
  double velocity_cost = 0.0;
  double consistency_cost = 0.0;
  int points_used = 0;
  int points_rejected = 0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double final_update_norm = 0.0;
  bool converged = false;
  std::vector<double> cost_trace;

  double total_cost() const {
    return point_cost + imu_cost + velocity_cost + consistency_cost;
  }
};

struct OptimizeResult {
  SweepStatePair states;
  ResidualReport report;
};

// Jointly refines the begin/end states of one down-sampled sweep against the
// map, the IMU-odometer pre-integration, the wheel velocity observations and
// the consistency prior. Throws DegenerateGeometryError when too few points
// have a usable plane, SolverStalledError when damping cannot reduce the cost
// while the update is still large.
OptimizeResult optimize_sweep(const Sweep &sweep, const VoxelMap &map,
                              const SweepStatePair &prediction,
                              const Preintegration &preint, const Vec3 &v_hat_b,
                              const Vec3 &v_hat_e, const NavState &prev_end,
                              const Vec3 &g_w, const Extrinsics &extr,
                              const SolverConfig &cfg);

}  // namespace liwo
