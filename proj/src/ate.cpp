#include "liwo/ate.hpp"

#include <algorithm>
#include <cmath>

#include "liwo/errors.hpp"

namespace liwo {

double evaluate_ate(const std::vector<TrajectoryRecord> &est,
                    const std::vector<TrajectoryRecord> &truth,
                    double max_stamp_gap) {
  if (truth.empty() || est.empty())
    throw EvaluationError("evaluate_ate: empty trajectory");

  std::vector<double> truth_stamps;
  truth_stamps.reserve(truth.size());
  for (const TrajectoryRecord &r : truth) truth_stamps.push_back(r.stamp);

  std::vector<std::pair<Vec3, Vec3>> pairs;  // (est, truth)
  for (const TrajectoryRecord &e : est) {
    auto it = std::lower_bound(truth_stamps.begin(), truth_stamps.end(), e.stamp);
    size_t best = truth_stamps.size();
    double best_gap = max_stamp_gap;
    if (it != truth_stamps.end() && std::abs(*it - e.stamp) <= best_gap) {
      best = static_cast<size_t>(it - truth_stamps.begin());
      best_gap = std::abs(*it - e.stamp);
    }
    if (it != truth_stamps.begin()) {
      const size_t prev = static_cast<size_t>(it - truth_stamps.begin()) - 1;
      if (std::abs(truth_stamps[prev] - e.stamp) < best_gap) {
        best = prev;
      }
    }
    if (best < truth.size()) pairs.emplace_back(e.t, truth[best].t);
  }
  if (pairs.size() < 3)
    throw EvaluationError("evaluate_ate: only " + std::to_string(pairs.size()) +
                          " associated pairs, need 3");

  Eigen::Matrix3Xd src(3, pairs.size()), dst(3, pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    src.col(static_cast<int>(i)) = pairs[i].first;
    dst.col(static_cast<int>(i)) = pairs[i].second;
  }
  const Eigen::Matrix4d T = Eigen::umeyama(src, dst, /*with_scaling=*/false);
  const Mat3 R = T.topLeftCorner<3, 3>();
  const Vec3 t = T.topRightCorner<3, 1>();

  double sum_sq = 0.0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const Vec3 d = R * pairs[i].first + t - pairs[i].second;
    sum_sq += d.squaredNorm();
  }
  return std::sqrt(sum_sq / static_cast<double>(pairs.size()));
}

}  // namespace liwo
