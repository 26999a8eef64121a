#pragma once

#include <map>
#include <string>
#include <vector>

#include "liwo/ate.hpp"
#include "liwo/geometry.hpp"
#include "liwo/sensors.hpp"
#include "liwo/sweep.hpp"

namespace liwo {

// All readers throw IoError on missing files or malformed rows (naming the
// file and line); writers throw IoError when the file cannot be opened.
// Numeric formatting uses enough digits for exact double round trips, so a
// write/read cycle is lossless and repeated runs are byte-comparable.

std::vector<ImuSample> read_imu_csv(const std::string &path);
void write_imu_csv(const std::string &path, const std::vector<ImuSample> &imu);

std::vector<WheelSample> read_wheel_csv(const std::string &path);
void write_wheel_csv(const std::string &path,
                     const std::vector<WheelSample> &wheel);

std::vector<Sweep> read_lidar_csv(const std::string &path);
void write_lidar_csv(const std::string &path, const std::vector<Sweep> &sweeps);

std::vector<TrajectoryRecord> read_trajectory(const std::string &path);
void write_trajectory(const std::string &path,
                      const std::vector<TrajectoryRecord> &records);

// Full-state ground truth (per-sample pose, velocity and biases), used by the
// ablation verb for velocity RMSE.
std::vector<NavState> read_states_csv(const std::string &path);
void write_states_csv(const std::string &path,
                      const std::vector<NavState> &states);

// ASCII PLY export of a world-frame point set.
void write_ply(const std::string &path, const std::vector<Vec3> &points);

// Flat "key = value" config text: '#' comments, blank lines ignored.
std::map<std::string, std::string> read_config(const std::string &path);

double config_get(const std::map<std::string, std::string> &cfg,
                  const std::string &key, double fallback);
int config_get(const std::map<std::string, std::string> &cfg,
               const std::string &key, int fallback);
std::string config_get(const std::map<std::string, std::string> &cfg,
                       const std::string &key, const std::string &fallback);

}  // namespace liwo
