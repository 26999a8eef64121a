#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "liwo/voxel_map.hpp"
#include "test_util.hpp"

using namespace liwo;

TEST_CASE("insert honors the per-voxel cap and reports rejections") {
  VoxelMap map(1.0);
  // 30 points into the same voxel: the first 20 stick.
  int accepted = 0;
  for (int i = 0; i < 30; ++i) {
    const Vec3 p(0.1 + 0.02 * i, 0.5, 0.5);
    if (map.insert(p)) ++accepted;
  }
  CHECK(accepted == VoxelMap::kMaxPointsPerVoxel);
  CHECK(map.voxel_count() == 1);
  CHECK(map.point_count() == 20);
  // A neighboring voxel is unaffected.
  CHECK(map.insert(Vec3(1.5, 0.5, 0.5)));
  CHECK(map.point_count() == 21);
}

TEST_CASE("cap and count invariants hold over random insert/prune traffic") {
  test::Random rng(61);
  VoxelMap map(1.0);
  size_t expected = 0;
  for (int op = 0; op < 10000; ++op) {
    if (op % 500 == 499) {
      // Occasional prune around a random center.
      const Vec3 c = rng.vec3(4.0);
      map.prune_far(c, rng.uniform(2.0, 6.0));
      expected = map.point_count();
      continue;
    }
    // Clustered points so voxels actually fill up.
    const Vec3 p = rng.vec3(4.0);
    const size_t in_voxel = [&] {
      auto it = map.cells().find(voxel_key_of(p, 1.0));
      return it == map.cells().end() ? size_t{0} : it->second.size();
    }();
    const bool ok = map.insert(p);
    CHECK(ok == (in_voxel < VoxelMap::kMaxPointsPerVoxel));
    if (ok) ++expected;
    if (op % 97 == 0) {
      CHECK(map.point_count() == expected);
      for (const auto &[key, pts] : map.cells()) {
        CHECK(!pts.empty());
        CHECK(pts.size() <= VoxelMap::kMaxPointsPerVoxel);
      }
    }
  }
  CHECK(map.point_count() == expected);
  CHECK(map.all_points().size() == expected);
}

namespace {

std::vector<Vec3> brute_force_neighbors(const std::vector<Vec3> &stored,
                                        const Vec3 &q, double voxel, int k) {
  const VoxelKey kq = voxel_key_of(q, voxel);
  std::vector<Vec3> block;
  for (const Vec3 &p : stored) {
    const VoxelKey kp = voxel_key_of(p, voxel);
    if (std::abs(kp.ix - kq.ix) <= 1 && std::abs(kp.iy - kq.iy) <= 1 &&
        std::abs(kp.iz - kq.iz) <= 1)
      block.push_back(p);
  }
  std::stable_sort(block.begin(), block.end(),
                   [&](const Vec3 &a, const Vec3 &b) {
                     return (a - q).squaredNorm() < (b - q).squaredNorm();
                   });
  if (static_cast<int>(block.size()) > k) block.resize(k);
  return block;
}

}  // namespace

TEST_CASE("neighbors match a brute-force 27-voxel oracle") {
  test::Random rng(62);
  VoxelMap map(1.0);
  std::vector<Vec3> stored;
  for (int i = 0; i < 3000; ++i) {
    const Vec3 p = rng.vec3(5.0);
    if (map.insert(p)) stored.push_back(p);
  }
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 q = rng.vec3(6.0);
    const auto got = map.neighbors(q, 20);
    const auto want = brute_force_neighbors(stored, q, 1.0, 20);
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i) {
      // Distances must agree exactly; points may differ only on exact ties.
      const double d_got = (got[i] - q).norm();
      const double d_want = (want[i] - q).norm();
      CHECK(d_got == d_want);
    }
    for (size_t i = 1; i < got.size(); ++i)
      CHECK((got[i] - q).squaredNorm() >= (got[i - 1] - q).squaredNorm());
  }
  CHECK(map.neighbors(Vec3(500.0, 0.0, 0.0)).empty());
}

TEST_CASE("prune_far removes only voxels whose center is out of range") {
  VoxelMap map(1.0);
  map.insert(Vec3(0.5, 0.5, 0.5));      // center (0.5,0.5,0.5)
  map.insert(Vec3(200.2, 0.5, 0.5));    // center (200.5,...): 200 m away
  map.insert(Vec3(149.1, 0.5, 0.5));    // center (149.5,...): within 150 m
  CHECK(map.prune_far(Vec3::Zero(), 150.0) == 1);
  CHECK(map.voxel_count() == 2);
  // Idempotent once pruned.
  CHECK(map.prune_far(Vec3::Zero(), 150.0) == 0);
  // The criterion is the voxel center, not the stored point.
  VoxelMap edge(1.0);
  edge.insert(Vec3(10.9, 0.0, 0.0));  // point at 10.9, center at 10.5
  CHECK(edge.prune_far(Vec3::Zero(), 10.6) == 0);
  CHECK(edge.prune_far(Vec3::Zero(), 10.4) == 1);
  CHECK(edge.empty());
}

TEST_CASE("register_sweep transforms points through the interpolated pose") {
  Sweep sweep;
  sweep.t_b = 0.0;
  sweep.t_e = 0.1;
  sweep.points = {{Vec3(5.0, 0.0, 0.0), 0.0},
                  {Vec3(5.0, 0.0, 0.0), 0.05},
                  {Vec3(5.0, 0.0, 0.0), 0.1}};
  // Begin at origin, end translated 1 m along x.
  NavState b(Vec3::Zero(), Quat::Identity(), Vec3::Zero(), Vec3::Zero(),
             Vec3::Zero(), 0.0);
  NavState e(Vec3(1.0, 0.0, 0.0), Quat::Identity(), Vec3::Zero(), Vec3::Zero(),
             Vec3::Zero(), 0.1);
  VoxelMap map(1.0);
  CHECK(map.register_sweep(sweep, SweepStatePair(b, e), Extrinsics{}) == 3);
  const auto pts = map.all_points();
  REQUIRE(pts.size() == 3);
  auto has = [&](const Vec3 &p) {
    for (const Vec3 &q : pts)
      if ((q - p).norm() < 1e-12) return true;
    return false;
  };
  CHECK(has(Vec3(5.0, 0.0, 0.0)));
  CHECK(has(Vec3(5.5, 0.0, 0.0)));
  CHECK(has(Vec3(6.0, 0.0, 0.0)));
}

TEST_CASE("register_sweep applies the lidar extrinsics and the cap") {
  Sweep sweep;
  sweep.t_b = 0.0;
  sweep.t_e = 0.1;
  for (int i = 0; i < 40; ++i)
    sweep.points.push_back({Vec3(0.201 + 1e-4 * i, 0.0, 0.0), 0.0});
  Extrinsics extr;
  extr.t_lidar_body = Vec3(0.1, 0.0, 0.2);
  NavState s(Vec3::Zero(), Quat::Identity(), Vec3::Zero(), Vec3::Zero(),
             Vec3::Zero(), 0.0);
  NavState e = s;
  e.stamp = 0.1;
  VoxelMap map(1.0);
  // All 40 land in one voxel: only the first 20 are added.
  CHECK(map.register_sweep(sweep, SweepStatePair(s, e), extr) == 20);
  const auto pts = map.all_points();
  REQUIRE(!pts.empty());
  CHECK((pts[0] - Vec3(0.301, 0.0, 0.2)).norm() < 1e-12);
}
