#pragma once

#include <unordered_map>
#include <vector>

#include "liwo/geometry.hpp"
#include "liwo/sweep.hpp"

namespace liwo {

// World-frame point map in 1.0 m voxels, at most `kMaxPointsPerVoxel` points
// each; once a voxel is full new points are dropped.
class VoxelMap {
 public:
  static constexpr int kMaxPointsPerVoxel = 20;

  explicit VoxelMap(double voxel_size = 1.0) : voxel_size_(voxel_size) {}

  double voxel_size() const { return voxel_size_; }
  size_t voxel_count() const { return voxels_.size(); }
  size_t point_count() const;
  bool empty() const { return voxels_.empty(); }

  // Inserts a world-frame point; returns false when its voxel is full.
  bool insert(const Vec3 &p_w);

  // Transforms each sweep point through the interpolated pose at its stamp
  // and inserts it. Returns the number of points actually added.
  int register_sweep(const Sweep &sweep, const SweepStatePair &states,
                     const Extrinsics &extr);

  // Up to `max_neighbors` stored points nearest to p_w, gathered from the
  // 3x3x3 voxel block around it and sorted by ascending distance (ties keep
  // insertion order).
  std::vector<Vec3> neighbors(const Vec3 &p_w, int max_neighbors = 20) const;

  // Removes voxels whose center is farther than `radius` from `center`;
  // returns the number of removed voxels.
  int prune_far(const Vec3 &center, double radius);

  // Flat snapshot of the stored points (voxel iteration order).
  std::vector<Vec3> all_points() const;

  const std::unordered_map<VoxelKey, std::vector<Vec3>, VoxelKeyHash> &cells()
      const {
    return voxels_;
  }

 private:
  double voxel_size_;
  std::unordered_map<VoxelKey, std::vector<Vec3>, VoxelKeyHash> voxels_;
};

}  // namespace liwo
