#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "liwo/geometry.hpp"

namespace liwo {

// One LiDAR return with its firing time.
struct TimedPoint {
  Vec3 p = Vec3::Zero();  // LiDAR frame, m
  double stamp = 0.0;     // s
};

// One full revolution of timed points over [t_b, t_e], sorted by stamp.
struct Sweep {
  std::vector<TimedPoint> points;
  double t_b = 0.0;
  double t_e = 0.0;
  int index = 0;
};

// Integer voxel coordinates: floor(coordinate / size) per axis, so negative
// coordinates floor toward -inf and the voxel at zero keeps unit width.
struct VoxelKey {
  int64_t ix = 0, iy = 0, iz = 0;
  bool operator==(const VoxelKey &) const = default;
};

VoxelKey voxel_key_of(const Vec3 &p, double voxel_size);

struct VoxelKeyHash {
  size_t operator()(const VoxelKey &k) const {
    // FNV-style mix of the three lattice coordinates.
    uint64_t h = 1469598103934665603ull;
    for (uint64_t c : {static_cast<uint64_t>(k.ix), static_cast<uint64_t>(k.iy),
                       static_cast<uint64_t>(k.iz)}) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

// Keeps at most one point per voxel of the given size, the first by stamp.
// Output preserves stamp ordering and is a subset of the input.
Sweep downsample(const Sweep &sweep, double voxel_size = 0.5);

}  // namespace liwo
