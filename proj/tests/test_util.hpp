#pragma once

// Shared helpers for the test binaries: deterministic random state
// generation and the chi-layout perturbation used by finite differencing.

#include <random>

#include "liwo/geometry.hpp"
#include "liwo/residuals.hpp"

namespace liwo::test {

struct Random {
  std::mt19937_64 gen;
  explicit Random(uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  Vec3 vec3(double scale) {
    return Vec3(uniform(-scale, scale), uniform(-scale, scale),
                uniform(-scale, scale));
  }
  Quat quat() { return so3_exp(vec3(1.5)); }
};

inline NavState random_state(Random &rng, double stamp) {
  return NavState(rng.vec3(5.0), rng.quat(), rng.vec3(2.0), rng.vec3(0.2),
                  rng.vec3(0.05), stamp);
}

// Right-perturbation of the stacked begin/end state along one chi column.
inline SweepStatePair perturb(const SweepStatePair &s, int col, double eps) {
  Eigen::Matrix<double, chi::kDim, 1> dx =
      Eigen::Matrix<double, chi::kDim, 1>::Zero();
  dx(col) = eps;
  SweepStatePair out = s;
  out.begin.t += dx.segment<3>(chi::kTb);
  out.begin.q = (s.begin.q * so3_exp(dx.segment<3>(chi::kThB))).normalized();
  out.begin.v += dx.segment<3>(chi::kVb);
  out.begin.b_a += dx.segment<3>(chi::kBaB);
  out.begin.b_w += dx.segment<3>(chi::kBwB);
  out.end.t += dx.segment<3>(chi::kTe);
  out.end.q = (s.end.q * so3_exp(dx.segment<3>(chi::kThE))).normalized();
  out.end.v += dx.segment<3>(chi::kVe);
  out.end.b_a += dx.segment<3>(chi::kBaE);
  out.end.b_w += dx.segment<3>(chi::kBwE);
  return out;
}

// Relative error with an absolute floor, for comparing Jacobian entries.
inline double rel_err(double analytic, double numeric, double floor = 1e-6) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

}  // namespace liwo::test
