#include "liwo/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "liwo/errors.hpp"

namespace liwo {

namespace {

using VecX = Eigen::Matrix<double, chi::kDim, 1>;
using MatH = Eigen::Matrix<double, chi::kDim, chi::kDim>;
using Mat18 = Eigen::Matrix<double, 18, 18>;

struct Association {
  TimedPoint point;
  PlaneFit fit;
};

SweepStatePair apply_update(const SweepStatePair &s, const VecX &dx) {
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

// Huber over a whitened squared norm: quadratic inside `delta`, linear
// growth outside. Returns the robust cost; `irls_weight` never exceeds 1.
double huber_cost(double squared_norm, double delta, double *irls_weight) {
  const double s = std::sqrt(squared_norm);
  if (s <= delta) {
    *irls_weight = 1.0;
    return squared_norm;
  }
  *irls_weight = delta / s;
  return delta * (2.0 * s - delta);
}

// Symmetric square root of the pre-integration information matrix, with the
// eta rows dropped when the wheel is disabled.
Mat18 imu_whitener(const Preintegration &preint, const SolverConfig &cfg) {
  Mat18 P = preint.P;
  P.diagonal().array() += cfg.preint_info_floor;
  Mat18 info = Mat18::Zero();
  if (cfg.use_wheel_residual) {
    info = P.inverse();
  } else {
    // Marginal information of the non-eta rows.
    Eigen::Matrix<double, 15, 15> sub;
    const int idx[15] = {0, 1, 2, 3, 4, 5, 6, 7, 8, 12, 13, 14, 15, 16, 17};
    for (int i = 0; i < 15; ++i)
      for (int j = 0; j < 15; ++j) sub(i, j) = P(idx[i], idx[j]);
    const Eigen::Matrix<double, 15, 15> sub_inv = sub.inverse();
    for (int i = 0; i < 15; ++i)
      for (int j = 0; j < 15; ++j) info(idx[i], idx[j]) = sub_inv(i, j);
  }
  info = (0.5 * (info + info.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Mat18> eig(info);
  const Eigen::Matrix<double, 18, 1> lam = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

struct Evaluation {
  MatH H = MatH::Zero();
  VecX g = VecX::Zero();
  double cost = 0.0;
  double point_cost = 0.0, imu_cost = 0.0, velocity_cost = 0.0,
         consistency_cost = 0.0;
};

Evaluation evaluate(const SweepStatePair &states,
                    const std::vector<Association> &assoc,
                    const Preintegration &preint, const Mat18 &W_imu,
                    const Vec3 &v_hat_b, const Vec3 &v_hat_e,
                    const NavState &prev_end, const Vec3 &g_w,
                    const Extrinsics &extr, const SolverConfig &cfg,
                    bool with_derivatives) {
  Evaluation ev;
  const double point_scale = 1.0 / std::sqrt(cfg.point_variance);

  for (const Association &a : assoc) {
    const PointPlaneResidual res =
        residual_point_plane(a.point, a.fit, states, extr);
    const double rw = res.r * point_scale;
    double w;
    ev.point_cost += huber_cost(rw * rw, cfg.huber_point, &w);
    if (with_derivatives) {
      const Eigen::Matrix<double, 1, chi::kDim> Jw =
          (point_scale * std::sqrt(w)) * res.J;
      ev.H.noalias() += Jw.transpose() * Jw;
      ev.g.noalias() += Jw.transpose() * (rw * std::sqrt(w));
    }
  }

  if (cfg.use_imu_residual) {
    const ImuOdomResidual res = residual_imu_odom(states, preint, g_w, extr);
    const Eigen::Matrix<double, 18, 1> rw = W_imu * res.r;
    double w;
    ev.imu_cost += huber_cost(rw.squaredNorm(), cfg.huber_block, &w);
    if (with_derivatives) {
      const Eigen::Matrix<double, 18, chi::kDim> Jw =
          std::sqrt(w) * (W_imu * res.J);
      ev.H.noalias() += Jw.transpose() * Jw;
      ev.g.noalias() += Jw.transpose() * (std::sqrt(w) * rw);
    }
  }

  if (cfg.use_wheel_residual) {
    const VelocityResidual res =
        residual_velocity(states, v_hat_b, v_hat_e, extr);
    const Eigen::Matrix<double, 6, 1> rw = cfg.velocity_weight * res.r;
    double w;
    ev.velocity_cost += huber_cost(rw.squaredNorm(), cfg.huber_block, &w);
    if (with_derivatives) {
      const Eigen::Matrix<double, 6, chi::kDim> Jw =
          (cfg.velocity_weight * std::sqrt(w)) * res.J;
      ev.H.noalias() += Jw.transpose() * Jw;
      ev.g.noalias() += Jw.transpose() * (std::sqrt(w) * rw);
    }
  }

  {
    const ConsistencyResidual res = residual_consistency(prev_end, states.begin);
    Eigen::Matrix<double, 15, 1> scale;
    scale.segment<3>(0).setConstant(cfg.consistency_t_weight);
    scale.segment<3>(3).setConstant(cfg.consistency_q_weight);
    scale.segment<3>(6).setConstant(cfg.consistency_v_weight);
    scale.segment<3>(9).setConstant(cfg.consistency_b_weight);
    scale.segment<3>(12).setConstant(cfg.consistency_b_weight);
    const Eigen::Matrix<double, 15, 1> rw = scale.asDiagonal() * res.r;
    double w;
    ev.consistency_cost += huber_cost(rw.squaredNorm(), cfg.huber_block, &w);
    if (with_derivatives) {
      const Eigen::Matrix<double, 15, chi::kDim> Jw =
          std::sqrt(w) * (scale.asDiagonal() * res.J);
      ev.H.noalias() += Jw.transpose() * Jw;
      ev.g.noalias() += Jw.transpose() * (std::sqrt(w) * rw);
    }
  }

  ev.cost = ev.point_cost + ev.imu_cost + ev.velocity_cost + ev.consistency_cost;
  return ev;
}

// Plane association at the given states, in a canonical order independent of
// the input point order.
std::vector<Association> associate(const Sweep &sweep, const VoxelMap &map,
                                   const SweepStatePair &states,
                                   const Extrinsics &extr,
                                   const SolverConfig &cfg, int *rejected) {
  std::vector<Association> assoc;
  assoc.reserve(sweep.points.size());
  *rejected = 0;
  for (const TimedPoint &tp : sweep.points) {
    const NavState x = interpolate_state(states, tp.stamp);
    const Vec3 p_w = x.q * extr.lidar_to_body(tp.p) + x.t;
    const std::vector<Vec3> nn = map.neighbors(p_w, cfg.max_neighbors);
    if (static_cast<int>(nn.size()) < cfg.min_neighbors) {
      ++*rejected;
      continue;
    }
    const PlaneFit fit = fit_plane(nn, cfg.min_neighbors);
    if (fit.planarity < cfg.min_planarity || fit.rms > cfg.max_plane_rms) {
      ++*rejected;
      continue;
    }
    assoc.push_back({tp, fit});
  }
  std::stable_sort(assoc.begin(), assoc.end(),
                   [](const Association &a, const Association &b) {
                     if (a.point.stamp != b.point.stamp)
                       return a.point.stamp < b.point.stamp;
                     return std::lexicographical_compare(
                         a.point.p.data(), a.point.p.data() + 3,
                         b.point.p.data(), b.point.p.data() + 3);
                   });
  return assoc;
}

}  // namespace

OptimizeResult optimize_sweep(const Sweep &sweep, const VoxelMap &map,
                              const SweepStatePair &prediction,
                              const Preintegration &preint, const Vec3 &v_hat_b,
                              const Vec3 &v_hat_e, const NavState &prev_end,
                              const Vec3 &g_w, const Extrinsics &extr,
                              const SolverConfig &cfg) {
  SweepStatePair states = prediction;
  const Mat18 W_imu =
      cfg.use_imu_residual ? imu_whitener(preint, cfg) : Mat18::Zero();

  ResidualReport report;
  double lambda = cfg.lambda_init;
  bool first_eval = true;

  for (int outer = 0; outer < cfg.max_outer_iterations; ++outer) {
    ++report.outer_iterations;

    // Associate every point with a locally fitted plane at the current states.
    int rejected = 0;
    const std::vector<Association> assoc =
        associate(sweep, map, states, extr, cfg, &rejected);
    report.points_used = static_cast<int>(assoc.size());
    report.points_rejected = rejected;
    if (static_cast<int>(assoc.size()) < cfg.min_valid_points)
      throw DegenerateGeometryError(
          "optimize_sweep: only " + std::to_string(assoc.size()) +
          " points with valid planes in sweep " + std::to_string(sweep.index));

    double outer_update_norm = 0.0;
    for (int inner = 0; inner < cfg.max_inner_iterations; ++inner) {
      ++report.inner_iterations;
      const Evaluation ev =
          evaluate(states, assoc, preint, W_imu, v_hat_b, v_hat_e, prev_end,
                   g_w, extr, cfg, true);
      if (first_eval) {
        report.initial_cost = ev.cost;
        first_eval = false;
      }
      report.cost_trace.push_back(ev.cost);

      bool accepted = false;
      VecX dx = VecX::Zero();
      while (lambda <= cfg.lambda_max) {
        MatH damped = ev.H;
        damped.diagonal() += lambda * ev.H.diagonal().cwiseMax(1e-9);
        dx = damped.ldlt().solve(-ev.g);
        const SweepStatePair candidate = apply_update(states, dx);
        const Evaluation trial =
            evaluate(candidate, assoc, preint, W_imu, v_hat_b, v_hat_e,
                     prev_end, g_w, extr, cfg, false);
        if (trial.cost < ev.cost) {
          states = candidate;
          lambda = std::max(lambda * 0.1, 1e-12);
          accepted = true;
          break;
        }
        lambda *= 10.0;
      }
      report.final_update_norm = dx.norm();
      outer_update_norm = dx.norm();
      if (!accepted) {
        if (dx.norm() < cfg.update_norm_threshold) {
          report.converged = true;
          break;  // at a (local) optimum
        }
        report.final_cost = ev.cost;
        throw SolverStalledError(
            "optimize_sweep: cost " + std::to_string(ev.cost) +
            " not reducible at sweep " + std::to_string(sweep.index) +
            " (update norm " + std::to_string(dx.norm()) + ")");
      }
      lambda = std::max(lambda, cfg.lambda_init * 1e-3);
      if (dx.norm() < cfg.update_norm_threshold) {
        report.converged = true;
        break;
      }
    }
    if (report.converged && outer_update_norm < cfg.update_norm_threshold) break;
  }

  // Final per-family costs at the converged states, re-associated once.
  {
    int rejected = 0;
    const std::vector<Association> assoc =
        associate(sweep, map, states, extr, cfg, &rejected);
    const Evaluation ev =
        evaluate(states, assoc, preint, W_imu, v_hat_b, v_hat_e, prev_end, g_w,
                 extr, cfg, false);
    report.point_cost = ev.point_cost;
    report.imu_cost = ev.imu_cost;
    report.velocity_cost = ev.velocity_cost;
    report.consistency_cost = ev.consistency_cost;
    report.final_cost = ev.cost;
  }
  return {states, report};
}

}  // namespace liwo
