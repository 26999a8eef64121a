#pragma once

#include <vector>

#include "liwo/geometry.hpp"
#include "liwo/preintegration.hpp"
#include "liwo/sweep.hpp"

namespace liwo {

// Column layout of the 30-dim optimization state chi = {x_b, x_e}.
// Rotation columns are right-perturbations: q <- q * Exp(d_theta).
namespace chi {
inline constexpr int kTb = 0, kThB = 3, kVb = 6, kBaB = 9, kBwB = 12;
inline constexpr int kTe = 15, kThE = 18, kVe = 21, kBaE = 24, kBwE = 27;
inline constexpr int kDim = 30;
}  // namespace chi

struct PlaneFit {
  Vec3 n = Vec3::UnitZ();   // unit normal, sign-canonicalized
  double d = 0.0;           // n . p + d = 0 on the plane
  double planarity = 0.0;   // (sqrt(l2) - sqrt(l3)) / sqrt(l1), in [0, 1]
  double rms = 0.0;         // RMS point-to-plane distance of the inputs
};

// Total-least-squares plane through >= min_points points (smallest scatter
// eigenvector). Throws DegenerateGeometryError below the point floor.
PlaneFit fit_plane(const std::vector<Vec3> &points, int min_points = 5);

struct PointPlaneResidual {
  double r = 0.0;
  Eigen::Matrix<double, 1, chi::kDim> J = Eigen::Matrix<double, 1, chi::kDim>::Zero();
};

// Signed planarity-weighted distance of the transformed point to the plane,
// with the pose interpolated at the point stamp (Jacobians chain through the
// slerp / linear blend).
PointPlaneResidual residual_point_plane(const TimedPoint &p, const PlaneFit &fit,
                                        const SweepStatePair &pair,
                                        const Extrinsics &extr);

struct ImuOdomResidual {
  Eigen::Matrix<double, 18, 1> r = Eigen::Matrix<double, 18, 1>::Zero();
  Eigen::Matrix<double, 18, chi::kDim> J =
      Eigen::Matrix<double, 18, chi::kDim>::Zero();
};

// Stacked pre-integration residual rows:
// [alpha(0), beta(3), gamma(6), eta(9), d_ba(12), d_bw(15)].
// The increments are bias-corrected at the begin-state biases on every call.
ImuOdomResidual residual_imu_odom(const SweepStatePair &pair,
                                  const Preintegration &preint, const Vec3 &g_w,
                                  const Extrinsics &extr);

struct VelocityResidual {
  Eigen::Matrix<double, 6, 1> r = Eigen::Matrix<double, 6, 1>::Zero();
  Eigen::Matrix<double, 6, chi::kDim> J =
      Eigen::Matrix<double, 6, chi::kDim>::Zero();
};

// Wheel velocity observation at both sweep boundaries (odometer-frame
// measurements v_hat rotated into the world frame through the state).
VelocityResidual residual_velocity(const SweepStatePair &pair, const Vec3 &v_hat_b,
                                   const Vec3 &v_hat_e, const Extrinsics &extr);

struct ConsistencyResidual {
  Eigen::Matrix<double, 15, 1> r = Eigen::Matrix<double, 15, 1>::Zero();
  Eigen::Matrix<double, 15, chi::kDim> J =
      Eigen::Matrix<double, 15, chi::kDim>::Zero();
};

// Ties the current begin state to the previous sweep's optimized end state:
// rows [t(0), q(3), v(6), ba(9), bw(12)].
ConsistencyResidual residual_consistency(const NavState &prev_end,
                                         const NavState &begin);

}  // namespace liwo
