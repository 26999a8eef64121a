#include "liwo/geometry.hpp"

#include <cmath>

#include "liwo/errors.hpp"

namespace liwo {

namespace {
constexpr double kSmallAngle = 1e-8;
}

bool rotationally_equal(const Quat &a, const Quat &b, double tol) {
  return std::abs(std::abs(a.dot(b)) - 1.0) < tol;
}

double rotation_angle(const Quat &a, const Quat &b) {
  double c = std::min(1.0, std::abs(a.dot(b)));
  return 2.0 * std::acos(c);
}

Mat3 skew(const Vec3 &v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Quat so3_exp(const Vec3 &phi) {
  if (!phi.allFinite()) throw ContractError("so3_exp: non-finite rotation vector");
  double theta = phi.norm();
  double imag;
  if (theta < kSmallAngle) {
    // sin(t/2)/t = 1/2 - t^2/48 + ...
    imag = 0.5 - theta * theta / 48.0;
  } else {
    imag = std::sin(0.5 * theta) / theta;
  }
  Quat q(std::cos(0.5 * theta), imag * phi.x(), imag * phi.y(), imag * phi.z());
  return q.normalized();
}

Vec3 so3_log(const Quat &q_in) {
  Quat q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  Vec3 vec(q.x(), q.y(), q.z());
  double n = vec.norm();
  if (n < kSmallAngle) return 2.0 * vec;  // small-angle branch
  double theta = 2.0 * std::atan2(n, q.w());
  return vec * (theta / n);
}

Mat3 so3_right_jacobian(const Vec3 &phi) {
  double theta = phi.norm();
  Mat3 S = skew(phi);
  if (theta < kSmallAngle) return Mat3::Identity() - 0.5 * S + S * S / 6.0;
  double t2 = theta * theta;
  double a = (1.0 - std::cos(theta)) / t2;
  double b = (theta - std::sin(theta)) / (t2 * theta);
  return Mat3::Identity() - a * S + b * S * S;
}

Mat3 so3_left_jacobian(const Vec3 &phi) { return so3_right_jacobian(-phi); }

Mat3 so3_right_jacobian_inverse(const Vec3 &phi) {
  double theta = phi.norm();
  Mat3 S = skew(phi);
  if (theta < kSmallAngle) return Mat3::Identity() + 0.5 * S + S * S / 12.0;
  double t2 = theta * theta;
  double b = 1.0 / t2 - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Mat3::Identity() + 0.5 * S + b * S * S;
}

Mat3 so3_left_jacobian_inverse(const Vec3 &phi) {
  return so3_right_jacobian_inverse(-phi);
}

Eigen::Vector4d quat_to_vec4(const Quat &q) {
  return Eigen::Vector4d(q.w(), q.x(), q.y(), q.z());
}

Eigen::Matrix4d left_product_matrix(const Quat &q) {
  Eigen::Matrix4d m;
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  m << w, -x, -y, -z,
       x,  w, -z,  y,
       y,  z,  w, -x,
       z, -y,  x,  w;
  return m;
}

Eigen::Matrix4d right_product_matrix(const Quat &q) {
  Eigen::Matrix4d m;
  const double w = q.w(), x = q.x(), y = q.y(), z = q.z();
  m << w, -x, -y, -z,
       x,  w,  z, -y,
       y, -z,  w,  x,
       z,  y, -x,  w;
  return m;
}

Quat slerp(const Quat &q0_in, const Quat &q1_in, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ContractError("slerp: alpha outside [0,1]");
  Quat q0 = q0_in.normalized();
  Quat q1 = q1_in.normalized();
  if (q0.dot(q1) < 0.0) q1.coeffs() = -q1.coeffs();  // shorter arc
  Vec3 delta = so3_log(q0.conjugate() * q1);
  return (q0 * so3_exp(alpha * delta)).normalized();
}

NavState::NavState(const Vec3 &t_, const Quat &q_, const Vec3 &v_,
                   const Vec3 &ba, const Vec3 &bw, double stamp_)
    : t(t_), q(q_.normalized()), v(v_), b_a(ba), b_w(bw), stamp(stamp_) {
  if (!(std::isfinite(stamp) && stamp >= 0.0))
    throw ContractError("NavState: stamp must be finite and non-negative");
}

SweepStatePair::SweepStatePair(NavState b, NavState e)
    : begin(std::move(b)), end(std::move(e)) {
  if (!(begin.stamp < end.stamp))
    throw ContractError("SweepStatePair: begin.stamp must precede end.stamp");
}

NavState interpolate_state(const SweepStatePair &pair, double t_p) {
  const double t_b = pair.begin.stamp;
  const double t_e = pair.end.stamp;
  if (t_p < t_b || t_p > t_e)
    throw RangeError("interpolate_state: t_p outside sweep interval");
  const double alpha = (t_p - t_b) / (t_e - t_b);
  NavState out;
  out.t = (1.0 - alpha) * pair.begin.t + alpha * pair.end.t;
  out.q = slerp(pair.begin.q, pair.end.q, alpha);
  out.v = (1.0 - alpha) * pair.begin.v + alpha * pair.end.v;
  out.b_a = (1.0 - alpha) * pair.begin.b_a + alpha * pair.end.b_a;
  out.b_w = (1.0 - alpha) * pair.begin.b_w + alpha * pair.end.b_w;
  out.stamp = t_p;
  return out;
}

}  // namespace liwo
