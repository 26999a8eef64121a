#include "liwo/sweep.hpp"

#include <cmath>
#include <unordered_set>

namespace liwo {

VoxelKey voxel_key_of(const Vec3 &p, double voxel_size) {
  return VoxelKey{static_cast<int64_t>(std::floor(p.x() / voxel_size)),
                  static_cast<int64_t>(std::floor(p.y() / voxel_size)),
                  static_cast<int64_t>(std::floor(p.z() / voxel_size))};
}

Sweep downsample(const Sweep &sweep, double voxel_size) {
  Sweep out;
  out.t_b = sweep.t_b;
  out.t_e = sweep.t_e;
  out.index = sweep.index;
  out.points.reserve(sweep.points.size());
  std::unordered_set<VoxelKey, VoxelKeyHash> occupied;
  occupied.reserve(sweep.points.size());
  for (const TimedPoint &tp : sweep.points) {
    if (occupied.insert(voxel_key_of(tp.p, voxel_size)).second)
      out.points.push_back(tp);
  }
  return out;
}

}  // namespace liwo
