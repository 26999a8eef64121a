#include "liwo/voxel_map.hpp"

#include <algorithm>
#include <cmath>

#include "liwo/errors.hpp"

namespace liwo {

size_t VoxelMap::point_count() const {
  size_t n = 0;
  for (const auto &[key, pts] : voxels_) n += pts.size();
  return n;
}

bool VoxelMap::insert(const Vec3 &p_w) {
  std::vector<Vec3> &cell = voxels_[voxel_key_of(p_w, voxel_size_)];
  if (cell.size() >= kMaxPointsPerVoxel) return false;
  if (cell.empty()) cell.reserve(kMaxPointsPerVoxel);
  cell.push_back(p_w);
  return true;
}

int VoxelMap::register_sweep(const Sweep &sweep, const SweepStatePair &states,
                             const Extrinsics &extr) {
  int added = 0;
  for (const TimedPoint &tp : sweep.points) {
    const NavState x = interpolate_state(states, tp.stamp);
    const Vec3 p_w = x.q * extr.lidar_to_body(tp.p) + x.t;
    if (insert(p_w)) ++added;
  }
  return added;
}

std::vector<Vec3> VoxelMap::neighbors(const Vec3 &p_w, int max_neighbors) const {
  const VoxelKey center = voxel_key_of(p_w, voxel_size_);
  std::vector<std::pair<double, Vec3>> candidates;
  for (int dx = -1; dx <= 1; ++dx)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dz = -1; dz <= 1; ++dz) {
        auto it = voxels_.find(
            VoxelKey{center.ix + dx, center.iy + dy, center.iz + dz});
        if (it == voxels_.end()) continue;
        for (const Vec3 &p : it->second)
          candidates.emplace_back((p - p_w).squaredNorm(), p);
      }
  const size_t keep = std::min<size_t>(max_neighbors, candidates.size());
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto &a, const auto &b) { return a.first < b.first; });
  std::vector<Vec3> out;
  out.reserve(keep);
  for (size_t i = 0; i < keep; ++i) out.push_back(candidates[i].second);
  return out;
}

int VoxelMap::prune_far(const Vec3 &center, double radius) {
  if (!(radius > 0.0)) throw ContractError("prune_far: radius must be positive");
  int removed = 0;
  for (auto it = voxels_.begin(); it != voxels_.end();) {
    const Vec3 voxel_center(
        (static_cast<double>(it->first.ix) + 0.5) * voxel_size_,
        (static_cast<double>(it->first.iy) + 0.5) * voxel_size_,
        (static_cast<double>(it->first.iz) + 0.5) * voxel_size_);
    if ((voxel_center - center).norm() > radius) {
      it = voxels_.erase(it);
      ++removed;
    } else {
      ++it;
    }
  }
  return removed;
}

std::vector<Vec3> VoxelMap::all_points() const {
  std::vector<Vec3> out;
  out.reserve(point_count());
  for (const auto &[key, pts] : voxels_)
    out.insert(out.end(), pts.begin(), pts.end());
  return out;
}

}  // namespace liwo
