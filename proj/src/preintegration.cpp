#include "liwo/preintegration.hpp"

#include <cmath>

#include "liwo/errors.hpp"

namespace liwo {

Preintegration integrate_step(const Preintegration &acc, const ImuOdomSample &s_n,
                              const ImuOdomSample &s_n1, const NoiseConfig &noise,
                              const Quat &q_odom_body, double max_dt) {
  if (!(s_n.stamp < s_n1.stamp))
    throw OrderingError("integrate_step: non-monotonic sample stamps");
  const double dt = s_n1.stamp - s_n.stamp;
  if (dt > max_dt)
    throw GapError("integrate_step: sample gap of " + std::to_string(dt) +
                   " s exceeds " + std::to_string(max_dt) + " s");

  Preintegration out = acc;
  const Mat3 R_ko = q_odom_body.toRotationMatrix();

  const Vec3 w_mid = 0.5 * (s_n.gyro + s_n1.gyro) - acc.b_w_ref;
  const Vec3 theta = w_mid * dt;
  const Quat dq = so3_exp(theta);
  const Quat gamma1 = (acc.gamma * dq).normalized();

  const Mat3 R0 = acc.gamma.toRotationMatrix();
  const Mat3 R1 = gamma1.toRotationMatrix();
  const Mat3 E = dq.toRotationMatrix();   // Exp(theta)
  const Mat3 Jr = so3_right_jacobian(theta);

  const Vec3 a0 = s_n.accel - acc.b_a_ref;
  const Vec3 a1 = s_n1.accel - acc.b_a_ref;
  const Vec3 f = 0.5 * (R0 * a0 + R1 * a1);      // mid-point accel, start frame
  const Vec3 w0 = R_ko * s_n.v_odom;
  const Vec3 w1 = R_ko * s_n1.v_odom;
  const Vec3 u = 0.5 * (R0 * w0 + R1 * w1);      // wheel velocity, start frame

  // Position uses the exact double integral of a linear acceleration over the
  // step (weights 1/3 and 1/6), not the mid-point value; this keeps the
  // recursion equivalent to a dense-substep integrator to higher order.
  const Vec3 G0 = R0 * a0;
  const Vec3 G1 = R1 * a1;
  out.alpha = acc.alpha + acc.beta * dt + (G0 / 3.0 + G1 / 6.0) * dt * dt;
  out.beta = acc.beta + f * dt;
  out.gamma = gamma1;
  out.eta = acc.eta + u * dt;
  out.dt = acc.dt + dt;

  // Exact first-order sensitivity blocks of the discrete step.
  const Mat3 F_tt = E.transpose();
  const Mat3 F_tbw = -Jr * dt;
  const Mat3 F_bt = -0.5 * dt * (R0 * skew(a0) + R1 * skew(a1) * E.transpose());
  const Mat3 F_bba = -0.5 * dt * (R0 + R1);
  const Mat3 F_bbw = 0.5 * dt * dt * R1 * skew(a1) * Jr;
  const Mat3 F_et = -0.5 * dt * (R0 * skew(w0) + R1 * skew(w1) * E.transpose());
  const Mat3 F_ebw = 0.5 * dt * dt * R1 * skew(w1) * Jr;
  // Alpha-row couplings matching the (1/3, 1/6) position weights.
  const Mat3 A_at = -dt * dt * (R0 * skew(a0) / 3.0 +
                                R1 * skew(a1) * E.transpose() / 6.0);
  const Mat3 A_aba = -dt * dt * (R0 / 3.0 + R1 / 6.0);
  const Mat3 A_abw = dt * dt * dt / 6.0 * R1 * skew(a1) * Jr;

  // Bias Jacobians, recursed with the pre-step gamma Jacobian.
  const Mat3 Jg = acc.J_bw_gamma;
  out.J_ba_beta = acc.J_ba_beta + F_bba;
  out.J_bw_beta = acc.J_bw_beta + F_bt * Jg + F_bbw;
  out.J_ba_alpha = acc.J_ba_alpha + acc.J_ba_beta * dt + A_aba;
  out.J_bw_alpha = acc.J_bw_alpha + acc.J_bw_beta * dt + A_at * Jg + A_abw;
  out.J_bw_gamma = F_tt * Jg + F_tbw;
  out.J_bw_eta = acc.J_bw_eta + F_et * Jg + F_ebw;
  // J_ba_eta stays zero: eta never touches the accelerometer.

  // Covariance propagation, error-state order [a, b, theta, eta, ba, bw].
  using MatP = Eigen::Matrix<double, kPreintDim, kPreintDim>;
  MatP A = MatP::Identity();
  A.block<3, 3>(0, 3) = dt * Mat3::Identity();
  A.block<3, 3>(0, 6) = A_at;
  A.block<3, 3>(0, 12) = A_aba;
  A.block<3, 3>(0, 15) = A_abw;
  A.block<3, 3>(3, 6) = F_bt;
  A.block<3, 3>(3, 12) = F_bba;
  A.block<3, 3>(3, 15) = F_bbw;
  A.block<3, 3>(6, 6) = F_tt;
  A.block<3, 3>(6, 15) = F_tbw;
  A.block<3, 3>(9, 6) = F_et;
  A.block<3, 3>(9, 15) = F_ebw;

  // Noise order: [na0, nw0, na1, nw1, n_ba, n_bw, n_v] (21 columns).
  Eigen::Matrix<double, kPreintDim, 21> B =
      Eigen::Matrix<double, kPreintDim, 21>::Zero();
  const Mat3 B_b_a0 = 0.5 * dt * R0;
  const Mat3 B_b_a1 = 0.5 * dt * R1;
  const Mat3 B_b_w = -0.25 * dt * dt * R1 * skew(a1) * Jr;
  const Mat3 B_e_w = -0.25 * dt * dt * R1 * skew(w1) * Jr;
  B.block<3, 3>(0, 0) = dt * dt / 3.0 * R0;
  B.block<3, 3>(0, 3) = -dt * dt * dt / 12.0 * R1 * skew(a1) * Jr;
  B.block<3, 3>(0, 6) = dt * dt / 6.0 * R1;
  B.block<3, 3>(0, 9) = -dt * dt * dt / 12.0 * R1 * skew(a1) * Jr;
  B.block<3, 3>(3, 0) = B_b_a0;
  B.block<3, 3>(3, 3) = B_b_w;
  B.block<3, 3>(3, 6) = B_b_a1;
  B.block<3, 3>(3, 9) = B_b_w;
  B.block<3, 3>(6, 3) = 0.5 * dt * Jr;
  B.block<3, 3>(6, 9) = 0.5 * dt * Jr;
  B.block<3, 3>(9, 3) = B_e_w;
  B.block<3, 3>(9, 9) = B_e_w;
  B.block<3, 3>(9, 18) = 0.5 * dt * (R0 + R1) * R_ko;
  B.block<3, 3>(12, 12) = Mat3::Identity();
  B.block<3, 3>(15, 15) = Mat3::Identity();

  Eigen::Matrix<double, 21, 1> q_diag;
  const double sa2 = noise.sigma_a * noise.sigma_a;
  const double sw2 = noise.sigma_w * noise.sigma_w;
  q_diag.segment<3>(0).setConstant(sa2);
  q_diag.segment<3>(3).setConstant(sw2);
  q_diag.segment<3>(6).setConstant(sa2);
  q_diag.segment<3>(9).setConstant(sw2);
  q_diag.segment<3>(12).setConstant(noise.sigma_ba * noise.sigma_ba * dt);
  q_diag.segment<3>(15).setConstant(noise.sigma_bw * noise.sigma_bw * dt);
  // Wheel speed noise acts on the forward axis only (odometer frame).
  q_diag.segment<3>(18) << noise.sigma_v * noise.sigma_v, 0.0, 0.0;

  out.P = A * acc.P * A.transpose() + B * q_diag.asDiagonal() * B.transpose();
  out.P = 0.5 * (out.P + out.P.transpose()).eval();
  return out;
}

Preintegration integrate_samples(const std::vector<ImuOdomSample> &samples,
                                 const NoiseConfig &noise, const Quat &q_odom_body,
                                 const Vec3 &b_a_ref, const Vec3 &b_w_ref,
                                 double max_dt) {
  Preintegration acc;
  acc.b_a_ref = b_a_ref;
  acc.b_w_ref = b_w_ref;
  for (size_t i = 0; i + 1 < samples.size(); ++i)
    acc = integrate_step(acc, samples[i], samples[i + 1], noise, q_odom_body,
                         max_dt);
  return acc;
}

CorrectedPreintegration correct_for_bias(const Preintegration &p,
                                         const Vec3 &b_a_new,
                                         const Vec3 &b_w_new) {
  const Vec3 dba = b_a_new - p.b_a_ref;
  const Vec3 dbw = b_w_new - p.b_w_ref;
  CorrectedPreintegration out;
  out.alpha = p.alpha + p.J_ba_alpha * dba + p.J_bw_alpha * dbw;
  out.beta = p.beta + p.J_ba_beta * dba + p.J_bw_beta * dbw;
  out.eta = p.eta + p.J_ba_eta * dba + p.J_bw_eta * dbw;
  const Vec3 half = 0.5 * (p.J_bw_gamma * dbw);
  out.gamma = (p.gamma * Quat(1.0, half.x(), half.y(), half.z())).normalized();
  return out;
}

SweepStatePair predict_states(const NavState &x_prev_end,
                              const std::vector<ImuOdomSample> &samples,
                              const Extrinsics &extr, const Vec3 &g_w,
                              bool use_wheel_velocity, double max_dt) {
  if (samples.size() < 2)
    throw GapError("predict_states: need at least two samples");
  const Mat3 R_ko = extr.q_odom_body.toRotationMatrix();
  Quat q = x_prev_end.q;
  Vec3 t = x_prev_end.t;
  Vec3 v = x_prev_end.v;
  for (size_t n = 0; n + 1 < samples.size(); ++n) {
    const ImuOdomSample &s0 = samples[n];
    const ImuOdomSample &s1 = samples[n + 1];
    if (!(s1.stamp > s0.stamp))
      throw OrderingError("predict_states: non-monotonic stamps");
    const double dt = s1.stamp - s0.stamp;
    if (dt > max_dt)
      throw GapError("predict_states: sample gap of " + std::to_string(dt) +
                     " s inside the interval");
    const Vec3 w_mid = 0.5 * (s0.gyro + s1.gyro) - x_prev_end.b_w;
    const Quat q1 = (q * so3_exp(w_mid * dt)).normalized();
    const Vec3 a_mid = 0.5 * (s0.accel + s1.accel) - x_prev_end.b_a;
    // World-frame acceleration: rotate the de-biased specific force and
    // remove the gravity term of the measurement model.
    const Vec3 a_w = 0.5 * (q.toRotationMatrix() + q1.toRotationMatrix()) * a_mid - g_w;
    t += v * dt + 0.5 * a_w * dt * dt;
    Vec3 v1;
    if (use_wheel_velocity) {
      v1 = q1.toRotationMatrix() * (R_ko * s1.v_odom);
    } else {
      v1 = v + a_w * dt;
    }
    v = v1;
    q = q1;
  }
  NavState begin = x_prev_end;
  begin.stamp = samples.front().stamp;
  NavState end(t, q, v, x_prev_end.b_a, x_prev_end.b_w, samples.back().stamp);
  return SweepStatePair(begin, end);
}

}  // namespace liwo
