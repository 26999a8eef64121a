#pragma once

#include <vector>

#include "liwo/geometry.hpp"
#include "liwo/sensors.hpp"

namespace liwo {

// Error-state ordering inside P and the step transition:
// [d_alpha, d_beta, d_theta, d_eta, d_ba, d_bw], 18 rows.
inline constexpr int kPreintDim = 18;

// Accumulated relative-motion increments between two sweep end times,
// expressed in the body frame at the interval start. Mid-point discrete
// recursion; biases held at the linearization point (b_a_ref, b_w_ref) and
// compensated to first order via the stored Jacobians.
struct Preintegration {
  double dt = 0.0;                  // accumulated interval, s
  Vec3 alpha = Vec3::Zero();        // translation increment, m
  Vec3 beta = Vec3::Zero();         // velocity increment, m/s
  Quat gamma = Quat::Identity();    // rotation increment
  Vec3 eta = Vec3::Zero();          // gyro+wheel translation increment, m

  Mat3 J_ba_alpha = Mat3::Zero();
  Mat3 J_bw_alpha = Mat3::Zero();
  Mat3 J_ba_beta = Mat3::Zero();
  Mat3 J_bw_beta = Mat3::Zero();
  Mat3 J_bw_gamma = Mat3::Zero();
  Mat3 J_ba_eta = Mat3::Zero();     // identically zero for this eta recursion
  Mat3 J_bw_eta = Mat3::Zero();

  Eigen::Matrix<double, kPreintDim, kPreintDim> P =
      Eigen::Matrix<double, kPreintDim, kPreintDim>::Zero();

  Vec3 b_a_ref = Vec3::Zero();
  Vec3 b_w_ref = Vec3::Zero();
};

// Bias-corrected increment values (first-order Jacobian update).
struct CorrectedPreintegration {
  Vec3 alpha;
  Vec3 beta;
  Quat gamma;
  Vec3 eta;
};

// Advances the accumulator by one mid-point step from sample s_n to s_n1.
// delta t must be positive and at most `max_dt` (default 50 ms).
Preintegration integrate_step(const Preintegration &acc, const ImuOdomSample &s_n,
                              const ImuOdomSample &s_n1, const NoiseConfig &noise,
                              const Quat &q_odom_body, double max_dt = 0.05);

// Integrates a whole sample series.
Preintegration integrate_samples(const std::vector<ImuOdomSample> &samples,
                                 const NoiseConfig &noise, const Quat &q_odom_body,
                                 const Vec3 &b_a_ref, const Vec3 &b_w_ref,
                                 double max_dt = 0.05);

CorrectedPreintegration correct_for_bias(const Preintegration &p,
                                         const Vec3 &b_a_new,
                                         const Vec3 &b_w_new);

// Wheel-aided prediction of the next sweep pair: begin state equals the
// previous end state; the end state follows the mid-point gyro rule with the
// velocity substituted directly from the wheel measurement at every step.
// With use_wheel_velocity false the velocity is propagated from the
// accelerometer instead (inertial-only prediction).
SweepStatePair predict_states(const NavState &x_prev_end,
                              const std::vector<ImuOdomSample> &samples,
                              const Extrinsics &extr, const Vec3 &g_w,
                              bool use_wheel_velocity = true,
                              double max_dt = 0.05);

}  // namespace liwo
