// Command-line front end: simulate datasets, run the odometry pipeline,
// evaluate trajectories, and run the sensor-ablation comparison.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "liwo/errors.hpp"
#include "liwo/io.hpp"
#include "liwo/pipeline.hpp"
#include "liwo/scenarios.hpp"
#include "liwo/simulator.hpp"

namespace fs = std::filesystem;
using namespace liwo;

namespace {

PipelineConfig load_pipeline_config(const std::string &path) {
  PipelineConfig pc;
  if (path.empty()) return pc;
  const auto kv = read_config(path);
  SolverConfig &s = pc.solver;
  s.max_outer_iterations = config_get(kv, "max_outer_iterations", s.max_outer_iterations);
  s.max_inner_iterations = config_get(kv, "max_inner_iterations", s.max_inner_iterations);
  s.update_norm_threshold = config_get(kv, "update_norm_threshold", s.update_norm_threshold);
  s.point_variance = config_get(kv, "point_variance", s.point_variance);
  s.huber_point = config_get(kv, "huber_point", s.huber_point);
  s.huber_block = config_get(kv, "huber_block", s.huber_block);
  s.velocity_weight = config_get(kv, "velocity_weight", s.velocity_weight);
  s.consistency_t_weight = config_get(kv, "consistency_t_weight", s.consistency_t_weight);
  s.consistency_q_weight = config_get(kv, "consistency_q_weight", s.consistency_q_weight);
  s.consistency_v_weight = config_get(kv, "consistency_v_weight", s.consistency_v_weight);
  s.consistency_b_weight = config_get(kv, "consistency_b_weight", s.consistency_b_weight);
  s.max_neighbors = config_get(kv, "max_neighbors", s.max_neighbors);
  s.min_neighbors = config_get(kv, "min_neighbors", s.min_neighbors);
  s.min_planarity = config_get(kv, "min_planarity", s.min_planarity);
  s.max_plane_rms = config_get(kv, "max_plane_rms", s.max_plane_rms);
  s.min_valid_points = config_get(kv, "min_valid_points", s.min_valid_points);
  pc.noise.sigma_a = config_get(kv, "sigma_a", pc.noise.sigma_a);
  pc.noise.sigma_w = config_get(kv, "sigma_w", pc.noise.sigma_w);
  pc.noise.sigma_ba = config_get(kv, "sigma_ba", pc.noise.sigma_ba);
  pc.noise.sigma_bw = config_get(kv, "sigma_bw", pc.noise.sigma_bw);
  pc.noise.sigma_v = config_get(kv, "sigma_v", pc.noise.sigma_v);
  pc.init.window = config_get(kv, "init_window", pc.init.window);
  pc.init.max_gyro_std = config_get(kv, "init_max_gyro_std", pc.init.max_gyro_std);
  pc.downsample_voxel = config_get(kv, "downsample_voxel", pc.downsample_voxel);
  pc.map_voxel = config_get(kv, "map_voxel", pc.map_voxel);
  pc.prune_radius = config_get(kv, "prune_radius", pc.prune_radius);
  pc.wheel_geometry.r_left = config_get(kv, "wheel_radius_left", pc.wheel_geometry.r_left);
  pc.wheel_geometry.r_right = config_get(kv, "wheel_radius_right", pc.wheel_geometry.r_right);
  pc.mode = mode_from_string(config_get(kv, "mode", std::string("liwo")));
  return pc;
}

struct RunArtifacts {
  PipelineResult result;
  double ate = -1.0;
  double vel_rmse = -1.0;
};

RunArtifacts run_dataset(const std::string &dataset, PipelineConfig config,
                         const std::string &out_dir) {
  const auto imu = read_imu_csv(dataset + "/imu.csv");
  const auto wheel = read_wheel_csv(dataset + "/wheel.csv");
  const auto sweeps = read_lidar_csv(dataset + "/lidar.csv");

  RunArtifacts art;
  art.result = run_pipeline(imu, wheel, sweeps, config);

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_trajectory(out_dir + "/trajectory.csv", art.result.trajectory);
    write_ply(out_dir + "/map.ply", art.result.map_points);
    std::ofstream timing(out_dir + "/timing.csv");
    timing << "# index,optimize_ms,register_ms,total_ms,flagged\n";
    for (const SweepResult &sr : art.result.sweeps)
      timing << sr.index << ',' << sr.optimize_ms << ',' << sr.register_ms
             << ',' << sr.total_ms << ',' << (sr.flagged ? 1 : 0) << '\n';
  }

  if (fs::exists(dataset + "/truth.csv")) {
    const auto truth = read_trajectory(dataset + "/truth.csv");
    art.ate = evaluate_ate(art.result.trajectory, truth);
  }
  if (fs::exists(dataset + "/truth_states.csv")) {
    const auto states = read_states_csv(dataset + "/truth_states.csv");
    art.vel_rmse = velocity_rmse(art.result.sweeps, states);
  }
  return art;
}

void print_run_summary(const std::string &label, const RunArtifacts &art) {
  int flagged = 0;
  std::vector<double> totals;
  for (const SweepResult &sr : art.result.sweeps) {
    if (sr.flagged) ++flagged;
    totals.push_back(sr.total_ms);
  }
  std::sort(totals.begin(), totals.end());
  const double median =
      totals.empty() ? 0.0 : totals[totals.size() / 2];
  std::cout << label << ": sweeps=" << art.result.sweeps.size()
            << " flagged=" << flagged << " median_ms=" << median;
  if (art.ate >= 0.0) std::cout << " ate_m=" << art.ate;
  if (art.vel_rmse >= 0.0) std::cout << " vel_rmse=" << art.vel_rmse;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"LiDAR-inertial-wheel odometry pipeline"};
  app.require_subcommand(1);

  // --- simulate ---
  auto *sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  std::string sim_out, scenario = "benchmark", noise_name = "nominal";
  uint64_t seed = 1;
  sim->add_option("--out", sim_out, "output dataset directory")->required();
  sim->add_option("--scenario", scenario, "benchmark | straight");
  sim->add_option("--noise", noise_name, "nominal | none");
  sim->add_option("--seed", seed, "random seed");

  // --- run ---
  auto *run = app.add_subcommand("run", "run odometry on a dataset");
  std::string run_data, run_out, run_config, run_mode;
  run->add_option("--dataset", run_data, "dataset directory")->required();
  run->add_option("--out", run_out, "output directory")->required();
  run->add_option("--config", run_config, "flat key=value config file");
  run->add_option("--mode", run_mode, "liwo | lio | lidar-only");

  // --- evaluate ---
  auto *eval = app.add_subcommand("evaluate", "absolute trajectory error");
  std::string eval_est, eval_truth;
  eval->add_option("--est", eval_est, "estimated trajectory file")->required();
  eval->add_option("--truth", eval_truth, "ground-truth trajectory file")->required();

  // --- ablate ---
  auto *abl = app.add_subcommand("ablate", "compare liwo / lio / lidar-only");
  std::string abl_dataset, abl_out, abl_config;
  bool abl_lidar_only = false;
  abl->add_option("--dataset", abl_dataset, "dataset directory")->required();
  abl->add_option("--out", abl_out, "output directory")->required();
  abl->add_option("--config", abl_config, "flat key=value config file");
  abl->add_flag("--lidar-only", abl_lidar_only, "include the lidar-only row");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      TrajectoryScript script;
      if (scenario == "benchmark") script = benchmark_script();
      else if (scenario == "straight") script = straight_script();
      else throw ContractError("unknown scenario '" + scenario + "'");
      NoiseConfig noise;
      if (noise_name == "nominal") noise = nominal_noise();
      else if (noise_name == "none") noise = NoiseConfig{};
      else throw ContractError("unknown noise preset '" + noise_name + "'");

      const SimOutput out = simulate(default_sim_config(script),
                                     benchmark_world(), noise, seed);
      fs::create_directories(sim_out);
      write_imu_csv(sim_out + "/imu.csv", out.imu);
      write_wheel_csv(sim_out + "/wheel.csv", out.wheel);
      write_lidar_csv(sim_out + "/lidar.csv", out.sweeps);
      std::vector<TrajectoryRecord> truth;
      truth.reserve(out.truth.size());
      for (size_t i = 0; i < out.truth.size(); ++i)
        truth.push_back({static_cast<int>(i), out.truth[i].stamp,
                         out.truth[i].t, out.truth[i].q});
      write_trajectory(sim_out + "/truth.csv", truth);
      write_states_csv(sim_out + "/truth_states.csv", out.truth);
      std::cout << "simulate: sweeps=" << out.sweeps.size()
                << " imu=" << out.imu.size() << " wheel=" << out.wheel.size()
                << " duration_s=" << out.duration << '\n';
    } else if (*run) {
      PipelineConfig pc = load_pipeline_config(run_config);
      if (!run_mode.empty()) pc.mode = mode_from_string(run_mode);
      const RunArtifacts art = run_dataset(run_data, pc, run_out);
      print_run_summary("run[" + mode_to_string(pc.mode) + "]", art);
    } else if (*eval) {
      const double ate =
          evaluate_ate(read_trajectory(eval_est), read_trajectory(eval_truth));
      std::cout << "ate_m=" << ate << '\n';
    } else if (*abl) {
      PipelineConfig pc = load_pipeline_config(abl_config);
      std::vector<Mode> modes = {Mode::kLiwo, Mode::kLio};
      if (abl_lidar_only) modes.push_back(Mode::kLidarOnly);
      for (Mode mode : modes) {
        PipelineConfig mc = pc;
        mc.mode = mode;
        const RunArtifacts art = run_dataset(
            abl_dataset, mc, abl_out + "/" + mode_to_string(mode));
        print_run_summary("ablate[" + mode_to_string(mode) + "]", art);
      }
    }
  } catch (const Error &e) {
    std::cerr << "error class=" << e.code() << " message=\"" << e.what()
              << "\"\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error class=internal message=\"" << e.what() << "\"\n";
    return 3;
  }
  return 0;
}
