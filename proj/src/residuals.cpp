#include "liwo/residuals.hpp"

#include <cmath>

#include "liwo/errors.hpp"

namespace liwo {

PlaneFit fit_plane(const std::vector<Vec3> &points, int min_points) {
  if (static_cast<int>(points.size()) < min_points)
    throw DegenerateGeometryError("fit_plane: " + std::to_string(points.size()) +
                                  " points, need " + std::to_string(min_points));
  Vec3 centroid = Vec3::Zero();
  for (const Vec3 &p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Mat3 scatter = Mat3::Zero();
  for (const Vec3 &p : points) {
    const Vec3 d = p - centroid;
    scatter += d * d.transpose();
  }
  scatter /= static_cast<double>(points.size());

  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);  // ascending eigenvalues
  const Vec3 lam = eig.eigenvalues().cwiseMax(0.0);
  const double s1 = std::sqrt(lam(2));
  const double s2 = std::sqrt(lam(1));
  const double s3 = std::sqrt(lam(0));

  PlaneFit fit;
  Vec3 n = eig.eigenvectors().col(0);
  for (int i = 0; i < 3; ++i) {
    if (std::abs(n(i)) > 1e-12) {
      if (n(i) < 0.0) n = -n;
      break;
    }
  }
  fit.n = n.normalized();
  fit.d = -fit.n.dot(centroid);
  fit.planarity = (s1 > 1e-12) ? (s2 - s3) / s1 : 0.0;
  fit.rms = s3;
  return fit;
}

namespace {

// First-order sensitivity of slerp(q_b, q_e, alpha) (as a right perturbation
// of the interpolated rotation) to right perturbations of the endpoints.
void slerp_jacobians(const Quat &q_b, const Quat &q_e, double alpha, Mat3 *D_b,
                     Mat3 *D_e) {
  Quat q1 = q_e;
  if (q_b.dot(q1) < 0.0) q1.coeffs() = -q1.coeffs();
  const Vec3 delta = so3_log(q_b.conjugate() * q1);
  const Vec3 ad = alpha * delta;
  const Mat3 Jr_ad = so3_right_jacobian(ad);
  *D_b = so3_exp(ad).toRotationMatrix().transpose() -
         alpha * Jr_ad * so3_left_jacobian_inverse(delta);
  *D_e = alpha * Jr_ad * so3_right_jacobian_inverse(delta);
}

inline Eigen::Vector4d conj4(const Eigen::Vector4d &q) {
  return Eigen::Vector4d(q(0), -q(1), -q(2), -q(3));
}

}  // namespace

PointPlaneResidual residual_point_plane(const TimedPoint &p, const PlaneFit &fit,
                                        const SweepStatePair &pair,
                                        const Extrinsics &extr) {
  const double t_b = pair.begin.stamp, t_e = pair.end.stamp;
  if (p.stamp < t_b || p.stamp > t_e)
    throw RangeError("residual_point_plane: point stamp outside sweep span");
  const double alpha = (p.stamp - t_b) / (t_e - t_b);

  const Vec3 p_body = extr.lidar_to_body(p.p);
  const Quat q_a = slerp(pair.begin.q, pair.end.q, alpha);
  const Vec3 t_a = (1.0 - alpha) * pair.begin.t + alpha * pair.end.t;
  const Vec3 p_w = q_a * p_body + t_a;

  PointPlaneResidual out;
  const double w = fit.planarity;
  out.r = w * (fit.n.dot(p_w) + fit.d);

  Mat3 D_b, D_e;
  slerp_jacobians(pair.begin.q, pair.end.q, alpha, &D_b, &D_e);
  const Eigen::RowVector3d n_t = w * fit.n.transpose();
  const Eigen::RowVector3d n_rot =
      n_t * (-(q_a.toRotationMatrix() * skew(p_body)));
  out.J.segment<3>(chi::kTb) = (1.0 - alpha) * n_t;
  out.J.segment<3>(chi::kTe) = alpha * n_t;
  out.J.segment<3>(chi::kThB) = n_rot * D_b;
  out.J.segment<3>(chi::kThE) = n_rot * D_e;
  return out;
}

ImuOdomResidual residual_imu_odom(const SweepStatePair &pair,
                                  const Preintegration &preint, const Vec3 &g_w,
                                  const Extrinsics &extr) {
  const double span = pair.end.stamp - pair.begin.stamp;
  if (std::abs(span - preint.dt) > 1e-6)
    throw ContractError("residual_imu_odom: pre-integration interval " +
                        std::to_string(preint.dt) + " s does not match sweep " +
                        std::to_string(span) + " s");
  const double dt = preint.dt;
  const NavState &xb = pair.begin;
  const NavState &xe = pair.end;
  const Mat3 R_bw = xb.q.toRotationMatrix().transpose();
  const Mat3 R_e = xe.q.toRotationMatrix();
  const Vec3 t_ko = extr.t_odom_body;

  const CorrectedPreintegration c = correct_for_bias(preint, xb.b_a, xb.b_w);

  ImuOdomResidual out;
  // alpha row.
  const Vec3 d_alpha = xe.t - xb.t + 0.5 * g_w * dt * dt - xb.v * dt;
  out.r.segment<3>(0) = R_bw * d_alpha - c.alpha;
  // beta row.
  const Vec3 d_beta = xe.v + g_w * dt - xb.v;
  out.r.segment<3>(3) = R_bw * d_beta - c.beta;
  // gamma row: 2 vec(q_b^-1 q_e gamma_c^-1), normalized gamma_c.
  const Quat q_be = xb.q.conjugate() * xe.q;
  const Vec3 dbw = xb.b_w - preint.b_w_ref;
  const Vec3 half = 0.5 * (preint.J_bw_gamma * dbw);
  const Eigen::Vector4d y =
      left_product_matrix(preint.gamma) * Eigen::Vector4d(1.0, half.x(), half.y(), half.z());
  const double y_norm = y.norm();
  const Eigen::Matrix4d L_be = left_product_matrix(q_be);
  const Eigen::Vector4d e4 = L_be * conj4(y) / y_norm;
  out.r.segment<3>(6) = 2.0 * e4.segment<3>(1);
  // eta row with the odometer lever arm.
  const Vec3 d_eta = xe.t - xb.t;
  out.r.segment<3>(9) = R_bw * d_eta - t_ko + R_bw * R_e * t_ko - c.eta;
  // bias difference rows.
  out.r.segment<3>(12) = xe.b_a - xb.b_a;
  out.r.segment<3>(15) = xe.b_w - xb.b_w;

  // --- Jacobians ---
  // alpha row.
  out.J.block<3, 3>(0, chi::kTb) = -R_bw;
  out.J.block<3, 3>(0, chi::kTe) = R_bw;
  out.J.block<3, 3>(0, chi::kVb) = -dt * R_bw;
  out.J.block<3, 3>(0, chi::kThB) = skew(R_bw * d_alpha);
  out.J.block<3, 3>(0, chi::kBaB) = -preint.J_ba_alpha;
  out.J.block<3, 3>(0, chi::kBwB) = -preint.J_bw_alpha;
  // beta row.
  out.J.block<3, 3>(3, chi::kVb) = -R_bw;
  out.J.block<3, 3>(3, chi::kVe) = R_bw;
  out.J.block<3, 3>(3, chi::kThB) = skew(R_bw * d_beta);
  out.J.block<3, 3>(3, chi::kBaB) = -preint.J_ba_beta;
  out.J.block<3, 3>(3, chi::kBwB) = -preint.J_bw_beta;
  // gamma row: derivatives of 2 vec(q_be * conj(y)/|y|).
  {
    const Eigen::Matrix4d R_gc_inv = right_product_matrix(
        Quat(y(0), y(1), y(2), y(3)).conjugate().normalized());
    // wrt theta_b: E' = [1, -d/2] * E.
    const Eigen::Matrix4d R_E =
        right_product_matrix(Quat(e4(0), e4(1), e4(2), e4(3)));
    out.J.block<3, 3>(6, chi::kThB) = -R_E.block<3, 3>(1, 1);
    // wrt theta_e: E' = q_be * Q(d) * gamma_c^-1.
    out.J.block<3, 3>(6, chi::kThE) =
        (L_be * R_gc_inv).block<3, 3>(1, 1);
    // wrt b_w at begin, through the corrected gamma (incl. normalization).
    Eigen::Matrix<double, 4, 3> dy;
    dy.setZero();
    dy.bottomRows<3>() = 0.5 * preint.J_bw_gamma;
    dy = left_product_matrix(preint.gamma) * dy;
    const Eigen::Matrix4d P_norm =
        (Eigen::Matrix4d::Identity() - y * y.transpose() / (y_norm * y_norm)) /
        y_norm;
    Eigen::Matrix4d C = Eigen::Matrix4d::Identity();
    C(1, 1) = C(2, 2) = C(3, 3) = -1.0;
    const Eigen::Matrix<double, 4, 3> dE = L_be * C * P_norm * dy;
    out.J.block<3, 3>(6, chi::kBwB) = 2.0 * dE.bottomRows<3>();
  }
  // eta row.
  out.J.block<3, 3>(9, chi::kTb) = -R_bw;
  out.J.block<3, 3>(9, chi::kTe) = R_bw;
  out.J.block<3, 3>(9, chi::kThB) = skew(R_bw * (d_eta + R_e * t_ko));
  out.J.block<3, 3>(9, chi::kThE) = -R_bw * R_e * skew(t_ko);
  out.J.block<3, 3>(9, chi::kBaB) = -preint.J_ba_eta;
  out.J.block<3, 3>(9, chi::kBwB) = -preint.J_bw_eta;
  // bias rows.
  out.J.block<3, 3>(12, chi::kBaB) = -Mat3::Identity();
  out.J.block<3, 3>(12, chi::kBaE) = Mat3::Identity();
  out.J.block<3, 3>(15, chi::kBwB) = -Mat3::Identity();
  out.J.block<3, 3>(15, chi::kBwE) = Mat3::Identity();
  return out;
}

VelocityResidual residual_velocity(const SweepStatePair &pair, const Vec3 &v_hat_b,
                                   const Vec3 &v_hat_e, const Extrinsics &extr) {
  const Mat3 R_ko = extr.q_odom_body.toRotationMatrix();
  const Mat3 R_b = pair.begin.q.toRotationMatrix();
  const Mat3 R_e = pair.end.q.toRotationMatrix();
  VelocityResidual out;
  const Vec3 u_b = R_ko * v_hat_b;
  const Vec3 u_e = R_ko * v_hat_e;
  out.r.segment<3>(0) = pair.begin.v - R_b * u_b;
  out.r.segment<3>(3) = pair.end.v - R_e * u_e;
  out.J.block<3, 3>(0, chi::kVb) = Mat3::Identity();
  out.J.block<3, 3>(0, chi::kThB) = R_b * skew(u_b);
  out.J.block<3, 3>(3, chi::kVe) = Mat3::Identity();
  out.J.block<3, 3>(3, chi::kThE) = R_e * skew(u_e);
  return out;
}

ConsistencyResidual residual_consistency(const NavState &prev_end,
                                         const NavState &begin) {
  ConsistencyResidual out;
  out.r.segment<3>(0) = begin.t - prev_end.t;
  const Quat q_err = prev_end.q.conjugate() * begin.q;
  out.r.segment<3>(3) = 2.0 * Vec3(q_err.x(), q_err.y(), q_err.z());
  out.r.segment<3>(6) = begin.v - prev_end.v;
  out.r.segment<3>(9) = begin.b_a - prev_end.b_a;
  out.r.segment<3>(12) = begin.b_w - prev_end.b_w;

  out.J.block<3, 3>(0, chi::kTb) = Mat3::Identity();
  out.J.block<3, 3>(3, chi::kThB) = left_product_matrix(q_err).block<3, 3>(1, 1);
  out.J.block<3, 3>(6, chi::kVb) = Mat3::Identity();
  out.J.block<3, 3>(9, chi::kBaB) = Mat3::Identity();
  out.J.block<3, 3>(12, chi::kBwB) = Mat3::Identity();
  return out;
}

}  // namespace liwo
