#include "liwo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "liwo/errors.hpp"
#include "liwo/preintegration.hpp"
#include "liwo/voxel_map.hpp"

namespace liwo {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

// Constant-motion extrapolation for the lidar-only mode: replay the previous
// sweep's relative transform.
SweepStatePair extrapolate(const NavState &prev_end,
                           const SweepStatePair &prev_pair, double t_b,
                           double t_e) {
  const Quat dq = prev_pair.begin.q.conjugate() * prev_pair.end.q;
  const Vec3 dt_body =
      prev_pair.begin.q.conjugate() * (prev_pair.end.t - prev_pair.begin.t);
  NavState begin = prev_end;
  begin.stamp = t_b;
  NavState end = begin;
  end.q = (begin.q * dq).normalized();
  end.t = begin.t + begin.q * dt_body;
  end.stamp = t_e;
  return {begin, end};
}

}  // namespace

Mode mode_from_string(const std::string &name) {
  if (name == "liwo") return Mode::kLiwo;
  if (name == "lio") return Mode::kLio;
  if (name == "lidar-only") return Mode::kLidarOnly;
  throw ContractError("unknown mode '" + name +
                      "' (expected liwo | lio | lidar-only)");
}

std::string mode_to_string(Mode mode) {
  switch (mode) {
    case Mode::kLiwo: return "liwo";
    case Mode::kLio: return "lio";
    case Mode::kLidarOnly: return "lidar-only";
  }
  return "?";
}

PipelineResult run_pipeline(const std::vector<ImuSample> &imu,
                            const std::vector<WheelSample> &wheel,
                            const std::vector<Sweep> &sweeps,
                            const PipelineConfig &config) {
  PipelineResult result;
  result.init = static_initialize(imu, wheel, config.wheel_geometry, config.init);

  SolverConfig solver = config.solver;
  bool use_wheel_prediction = true;
  switch (config.mode) {
    case Mode::kLiwo:
      break;
    case Mode::kLio:
      solver.use_wheel_residual = false;
      use_wheel_prediction = false;
      break;
    case Mode::kLidarOnly:
      solver.use_wheel_residual = false;
      solver.use_imu_residual = false;
      use_wheel_prediction = false;
      break;
  }

  const double t_init_end = imu.front().stamp + config.init.window;
  VoxelMap map(config.map_voxel);
  NavState prev_end;
  SweepStatePair prev_pair;
  bool have_state = false;

  for (const Sweep &sweep : sweeps) {
    if (sweep.t_b < t_init_end) continue;  // consumed by initialization
    const auto t_start = std::chrono::steady_clock::now();

    SweepResult sr;
    sr.index = sweep.index;

    if (!have_state) {
      // Anchor the first processed sweep at the initialization state and
      // register it without optimization (the map is still empty).
      NavState x0(Vec3::Zero(), result.init.q0, result.init.v0,
                  result.init.b_a, result.init.b_w, sweep.t_b);
      const std::vector<ImuOdomSample> samples =
          fuse_imu_wheel(imu, wheel, config.wheel_geometry, sweep.t_b,
                         sweep.t_e, config.max_sample_gap);
      sr.states = predict_states(x0, samples, config.extrinsics,
                                 result.init.g_w, use_wheel_prediction,
                                 config.max_sample_gap);
      const auto t_reg = std::chrono::steady_clock::now();
      map.register_sweep(downsample(sweep, config.downsample_voxel), sr.states,
                         config.extrinsics);
      sr.register_ms = ms_since(t_reg);
    } else {
      const std::vector<ImuOdomSample> samples =
          fuse_imu_wheel(imu, wheel, config.wheel_geometry, sweep.t_b,
                         sweep.t_e, config.max_sample_gap);
      SweepStatePair prediction;
      Preintegration preint;
      if (config.mode == Mode::kLidarOnly) {
        prediction = extrapolate(prev_end, prev_pair, sweep.t_b, sweep.t_e);
      } else {
        prediction = predict_states(prev_end, samples, config.extrinsics,
                                    result.init.g_w, use_wheel_prediction,
                                    config.max_sample_gap);
        preint = integrate_samples(samples, config.noise,
                                   config.extrinsics.q_odom_body, prev_end.b_a,
                                   prev_end.b_w, config.max_sample_gap);
      }
      const Sweep down = downsample(sweep, config.downsample_voxel);
      const auto t_opt = std::chrono::steady_clock::now();
      try {
        OptimizeResult opt = optimize_sweep(
            down, map, prediction, preint, samples.front().v_odom,
            samples.back().v_odom, prev_end, result.init.g_w,
            config.extrinsics, solver);
        sr.states = opt.states;
        sr.report = opt.report;
        sr.optimized = true;
      } catch (const DegenerateGeometryError &e) {
        sr.states = prediction;
        sr.flagged = true;
        sr.flag_reason = e.what();
      } catch (const SolverStalledError &e) {
        sr.states = prediction;
        sr.flagged = true;
        sr.flag_reason = e.what();
      }
      sr.optimize_ms = ms_since(t_opt);
      const auto t_reg = std::chrono::steady_clock::now();
      map.register_sweep(down, sr.states, config.extrinsics);
      map.prune_far(sr.states.end.t, config.prune_radius);
      sr.register_ms = ms_since(t_reg);
    }

    prev_end = sr.states.end;
    prev_pair = sr.states;
    have_state = true;
    sr.total_ms = ms_since(t_start);
    result.trajectory.push_back(
        {sweep.index, sr.states.end.stamp, sr.states.end.t, sr.states.end.q});
    result.sweeps.push_back(std::move(sr));
  }

  if (result.sweeps.empty())
    throw ContractError("run_pipeline: no sweeps after the init window");
  result.map_points = map.all_points();
  return result;
}

double velocity_rmse(const std::vector<SweepResult> &sweeps,
                     const std::vector<NavState> &truth,
                     double max_stamp_gap) {
  if (truth.empty()) throw EvaluationError("velocity_rmse: empty ground truth");
  double sum_sq = 0.0;
  int n = 0;
  for (const SweepResult &sr : sweeps) {
    const double stamp = sr.states.end.stamp;
    auto it = std::lower_bound(
        truth.begin(), truth.end(), stamp,
        [](const NavState &s, double t) { return s.stamp < t; });
    const NavState *best = nullptr;
    double best_gap = max_stamp_gap;
    if (it != truth.end() && std::abs(it->stamp - stamp) <= best_gap) {
      best = &*it;
      best_gap = std::abs(it->stamp - stamp);
    }
    if (it != truth.begin() && std::abs(std::prev(it)->stamp - stamp) < best_gap)
      best = &*std::prev(it);
    if (!best) continue;
    sum_sq += (sr.states.end.v - best->v).squaredNorm();
    ++n;
  }
  if (n < 3)
    throw EvaluationError("velocity_rmse: only " + std::to_string(n) +
                          " associated states");
  return std::sqrt(sum_sq / n);
}

}  // namespace liwo
