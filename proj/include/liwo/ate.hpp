#pragma once

#include <vector>

#include "liwo/geometry.hpp"

namespace liwo {

// One pose line of an estimated or ground-truth trajectory file.
struct TrajectoryRecord {
  int index = 0;
  double stamp = 0.0;
  Vec3 t = Vec3::Zero();
  Quat q = Quat::Identity();
};

// Absolute translational error: nearest-stamp association (within
// `max_stamp_gap`), rigid Umeyama alignment without scale, then RMSE of the
// remaining translation differences. Throws EvaluationError with fewer than
// three associated pairs.
double evaluate_ate(const std::vector<TrajectoryRecord> &est,
                    const std::vector<TrajectoryRecord> &truth,
                    double max_stamp_gap = 0.01);

}  // namespace liwo
