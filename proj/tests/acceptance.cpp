// Acceptance gate: one pass/fail line per criterion, exit 0 only if all pass.
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "liwo/ate.hpp"
#include "liwo/io.hpp"
#include "liwo/pipeline.hpp"
#include "liwo/preintegration.hpp"
#include "liwo/scenarios.hpp"
#include "liwo/simulator.hpp"
#include "liwo/voxel_map.hpp"
#include "test_util.hpp"

using namespace liwo;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string &detail) {
  std::printf("%s criterion-%02d: %s\n", pass ? "PASS" : "FAIL", id,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Joint zero-residual at ground truth on a noiseless constant-velocity run.
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  TrajectoryScript script;
  script.segments = {{2.0, 0.0, 0.0}, {3.5, 1.0, 0.0}};
  const SimOutput sim =
      simulate(default_sim_config(script), benchmark_world(), NoiseConfig{}, 1);

  const WheelGeometry geom{0.15, 0.15};
  const Extrinsics extr;
  const Vec3 g_w = sim.g_w;
  auto truth_at = [&](double stamp) {
    const size_t i = static_cast<size_t>(std::llround(stamp * 200.0));
    return sim.truth[std::min(i, sim.truth.size() - 1)];
  };

  const SimWorld world = benchmark_world();
  std::vector<const Sweep *> eval_sweeps;
  for (const Sweep &sw : sim.sweeps)
    if (sw.t_b >= 3.0 && eval_sweeps.size() < 10) eval_sweeps.push_back(&sw);

  double worst = 0.0;
  bool ok = eval_sweeps.size() == 10;
  NavState prev_end = truth_at(eval_sweeps.front()->t_b);
  for (const Sweep *swp : eval_sweeps) {
    const Sweep down = downsample(*swp, 0.5);
    const SweepStatePair truth(truth_at(down.t_b), truth_at(down.t_e));
    const auto samples =
        fuse_imu_wheel(sim.imu, sim.wheel, geom, down.t_b, down.t_e, 0.05);
    const Preintegration preint = integrate_samples(
        samples, NoiseConfig{}, extr.q_odom_body, truth.begin.b_a,
        truth.begin.b_w);

    // Point family against the exact world plane each return lies on.
    double point_sq = 0.0;
    for (const TimedPoint &tp : down.points) {
      const NavState x = interpolate_state(truth, tp.stamp);
      const Vec3 p_w = x.q * extr.lidar_to_body(tp.p) + x.t;
      PlaneFit fit;
      fit.planarity = 1.0;
      double best = 1e300;
      for (const BoundedPlane &pl : world.planes) {
        const double d0 = -pl.normal.dot(pl.center);
        const double dist = std::abs(pl.normal.dot(p_w) + d0);
        if (dist < best) {
          best = dist;
          fit.n = pl.normal;
          fit.d = d0;
        }
      }
      const PointPlaneResidual r = residual_point_plane(tp, fit, truth, extr);
      point_sq += r.r * r.r;
    }
    const ImuOdomResidual ri = residual_imu_odom(truth, preint, g_w, extr);
    const VelocityResidual rv = residual_velocity(
        truth, samples.front().v_odom, samples.back().v_odom, extr);
    const ConsistencyResidual rc = residual_consistency(prev_end, truth.begin);
    prev_end = truth.end;

    worst = std::max({worst, std::sqrt(point_sq), ri.r.norm(), rv.r.norm(),
                      rc.r.norm()});
  }
  const double dt = seconds_since(t0);
  ok = ok && worst < 1e-6 && dt < 5.0;
  report(1, ok, "joint zero-residual at truth, 10 sweeps: worst family norm " +
                    fmt(worst) + " (< 1e-6), " + fmt(dt) + " s (< 5)");
}

// ---------------------------------------------------------------------------
// Band-limited analytic stream shared by criteria 2 and 3.
struct Signal {
  Vec3 gyro_a, gyro_b, accel_a, accel_b, vel_a, vel_b;
  double f1, f2, f3;

  static Signal random(test::Random &rng, double gyro_scale) {
    Signal s;
    s.gyro_a = rng.vec3(gyro_scale);
    s.gyro_b = rng.vec3(0.6 * gyro_scale);
    s.accel_a = rng.vec3(2.0);
    s.accel_b = rng.vec3(0.5);
    s.vel_a = rng.vec3(1.0);
    s.vel_b = rng.vec3(0.5);
    s.f1 = rng.uniform(0.5, 3.0);
    s.f2 = rng.uniform(0.5, 3.0);
    s.f3 = rng.uniform(0.5, 3.0);
    return s;
  }

  std::vector<ImuOdomSample> sample(double rate) const {
    std::vector<ImuOdomSample> out;
    const int n = static_cast<int>(std::llround(0.1 * rate));
    for (int i = 0; i <= n; ++i) {
      const double t = 0.1 * i / n;
      out.push_back({t, gyro_a + gyro_b * std::sin(f1 * t),
                     accel_a + accel_b * std::cos(f2 * t),
                     vel_a + vel_b * std::sin(f3 * t)});
    }
    return out;
  }
};

std::vector<ImuOdomSample> densify(const std::vector<ImuOdomSample> &in, int k) {
  std::vector<ImuOdomSample> out;
  for (size_t i = 0; i + 1 < in.size(); ++i)
    for (int j = 0; j < k; ++j) {
      const double u = static_cast<double>(j) / k;
      ImuOdomSample s;
      s.stamp = (1.0 - u) * in[i].stamp + u * in[i + 1].stamp;
      s.gyro = (1.0 - u) * in[i].gyro + u * in[i + 1].gyro;
      s.accel = (1.0 - u) * in[i].accel + u * in[i + 1].accel;
      s.v_odom = (1.0 - u) * in[i].v_odom + u * in[i + 1].v_odom;
      out.push_back(s);
    }
  out.push_back(in.back());
  return out;
}

// 2. Increments match a 10x-substep dense oracle on 100 random streams.
void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  test::Random rng(202);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    // Ground-vehicle-grade rotation rates; the mid-point translation
    // recursion carries an O(|w| dt^2 / T) relative bias beyond that.
    const Signal sig = Signal::random(rng, 0.05);
    const Vec3 ba = rng.vec3(0.05), bw = rng.vec3(0.02);
    const auto samples = sig.sample(200.0);
    const Preintegration coarse = integrate_samples(samples, NoiseConfig{},
                                                    Quat::Identity(), ba, bw);
    const Preintegration dense = integrate_samples(
        densify(samples, 10), NoiseConfig{}, Quat::Identity(), ba, bw);
    worst = std::max(
        {worst,
         (coarse.alpha - dense.alpha).norm() /
             std::max(dense.alpha.norm(), 1e-3),
         (coarse.beta - dense.beta).norm() / std::max(dense.beta.norm(), 1e-3),
         (coarse.eta - dense.eta).norm() / std::max(dense.eta.norm(), 1e-3),
         so3_log(coarse.gamma.conjugate() * dense.gamma).norm() /
             std::max(so3_log(dense.gamma).norm(), 1e-3)});
  }
  const double dt = seconds_since(t0);
  const bool ok = worst < 1e-5 && dt < 10.0;
  report(2, ok, "dense-substep oracle, 100 streams: worst relative error " +
                    fmt(worst) + " (< 1e-5), " + fmt(dt) + " s (< 10)");
}

// 3. All seven bias Jacobians match central finite differences.
void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  test::Random rng(203);
  const double eps = 1e-5;
  double worst = 0.0;
  auto col_err = [](const Vec3 &analytic, const Vec3 &hi, const Vec3 &lo,
                    double eps_) {
    const Vec3 fd = (hi - lo) / (2.0 * eps_);
    return (analytic - fd).norm() /
           std::max({analytic.norm(), fd.norm(), 1e-3});
  };
  for (int trial = 0; trial < 50; ++trial) {
    const Signal sig = Signal::random(rng, 0.5);
    const Vec3 ba = rng.vec3(0.05), bw = rng.vec3(0.02);
    const Quat q_ko = (trial % 2 == 0) ? Quat::Identity() : rng.quat();
    auto integ = [&](const Vec3 &ba_, const Vec3 &bw_) {
      return integrate_samples(sig.sample(200.0), NoiseConfig{}, q_ko, ba_,
                               bw_);
    };
    const Preintegration p0 = integ(ba, bw);
    for (int c = 0; c < 3; ++c) {
      Vec3 d = Vec3::Zero();
      d(c) = eps;
      const Preintegration ap = integ(ba + d, bw), am = integ(ba - d, bw);
      const Preintegration wp = integ(ba, bw + d), wm = integ(ba, bw - d);
      worst = std::max(
          {worst, col_err(p0.J_ba_alpha.col(c), ap.alpha, am.alpha, eps),
           col_err(p0.J_bw_alpha.col(c), wp.alpha, wm.alpha, eps),
           col_err(p0.J_ba_beta.col(c), ap.beta, am.beta, eps),
           col_err(p0.J_bw_beta.col(c), wp.beta, wm.beta, eps),
           col_err(p0.J_bw_eta.col(c), wp.eta, wm.eta, eps),
           // J_ba_eta is identically zero; its finite difference must be too.
           (ap.eta - am.eta).norm() + p0.J_ba_eta.norm(),
           (so3_log(p0.gamma.conjugate() * wp.gamma) -
            so3_log(p0.gamma.conjugate() * wm.gamma))
                   .norm() > 0.0
               ? col_err(p0.J_bw_gamma.col(c),
                         so3_log(p0.gamma.conjugate() * wp.gamma),
                         so3_log(p0.gamma.conjugate() * wm.gamma), eps)
               : 0.0});
    }
  }
  const double dt = seconds_since(t0);
  const bool ok = worst < 1e-5 && dt < 30.0;
  report(3, ok, "bias jacobians vs finite differences, 50 streams: worst " +
                    fmt(worst) + " (< 1e-5), " + fmt(dt) + " s (< 30)");
}

// ---------------------------------------------------------------------------
struct RunOutcome {
  double ate = 0.0;
  double vel_rmse = 0.0;
  std::vector<double> sweep_ms;
  PipelineResult result;
};

RunOutcome run_benchmark(const SimOutput &sim, Mode mode) {
  PipelineConfig cfg;
  cfg.mode = mode;
  RunOutcome out;
  out.result = run_pipeline(sim.imu, sim.wheel, sim.sweeps, cfg);
  std::vector<TrajectoryRecord> truth;
  for (size_t i = 0; i < sim.truth.size(); ++i)
    truth.push_back({static_cast<int>(i), sim.truth[i].stamp, sim.truth[i].t,
                     sim.truth[i].q});
  out.ate = evaluate_ate(out.result.trajectory, truth);
  out.vel_rmse = velocity_rmse(out.result.sweeps, sim.truth);
  for (const SweepResult &sr : out.result.sweeps) out.sweep_ms.push_back(sr.total_ms);
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.empty() ? 0.0 : v[v.size() / 2];
}

// 4 + 8. Noiseless 60 s benchmark: ATE and per-sweep wall time.
void criteria_4_and_8() {
  const auto t0 = std::chrono::steady_clock::now();
  const SimOutput sim = simulate(default_sim_config(benchmark_script()),
                                 benchmark_world(), NoiseConfig{}, 1);
  const RunOutcome run = run_benchmark(sim, Mode::kLiwo);
  const double dt = seconds_since(t0);
  const bool ok4 = run.ate < 0.02 && dt < 60.0;
  report(4, ok4, "noiseless 60 s benchmark: ATE " + fmt(run.ate) +
                     " m (< 0.02), " + fmt(dt) + " s (< 60)");
  const double med = median(run.sweep_ms);
  report(8, med < 100.0, "real-time budget: median per-sweep " + fmt(med) +
                             " ms (< 100) over " +
                             std::to_string(run.sweep_ms.size()) + " sweeps");
}

// 5 + 6. Noisy benchmark over 5 seeds: accuracy and ablation ordering.
void criteria_5_and_6() {
  std::vector<double> liwo_ate, lio_ate, liwo_vel, lio_vel;
  double liwo_seconds = 0.0;
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const SimOutput sim = simulate(default_sim_config(benchmark_script()),
                                   benchmark_world(), nominal_noise(), seed);
    const auto t0 = std::chrono::steady_clock::now();
    const RunOutcome liwo = run_benchmark(sim, Mode::kLiwo);
    liwo_seconds += seconds_since(t0);
    const RunOutcome lio = run_benchmark(sim, Mode::kLio);
    liwo_ate.push_back(liwo.ate);
    lio_ate.push_back(lio.ate);
    liwo_vel.push_back(liwo.vel_rmse);
    lio_vel.push_back(lio.vel_rmse);
  }
  const double med = median(liwo_ate);
  report(5, med < 0.15 && liwo_seconds < 300.0,
         "noisy benchmark, 5 seeds: median LIWO ATE " + fmt(med) +
             " m (< 0.15), LIWO runtime " + fmt(liwo_seconds) + " s (< 300)");

  int ate_wins = 0;
  bool vel_all = true;
  std::string detail;
  for (size_t i = 0; i < 5; ++i) {
    if (liwo_ate[i] <= lio_ate[i]) ++ate_wins;
    if (!(liwo_vel[i] < lio_vel[i])) vel_all = false;
    detail += " s" + std::to_string(i + 1) + ":" + fmt(liwo_ate[i]) + "/" +
              fmt(lio_ate[i]);
  }
  report(6, ate_wins >= 4 && vel_all,
         "ablation ordering: LIWO ATE <= LIO on " + std::to_string(ate_wins) +
             "/5 seeds (need >= 4), velocity RMSE better on " +
             (vel_all ? std::string("all") : std::string("NOT all")) +
             " seeds; ATE liwo/lio:" + detail);
}

// 7. Map and downsample cap invariants over random operations.
void criterion_7() {
  test::Random rng(207);
  VoxelMap map(1.0);
  bool ok = true;
  for (int op = 0; op < 10000; ++op) {
    map.insert(rng.vec3(4.0));
    if (op % 1000 == 999) map.prune_far(rng.vec3(2.0), rng.uniform(2.0, 6.0));
    if (op % 200 == 0)
      for (const auto &[key, pts] : map.cells())
        if (pts.size() > VoxelMap::kMaxPointsPerVoxel) ok = false;
  }
  for (const auto &[key, pts] : map.cells())
    if (pts.empty() || pts.size() > VoxelMap::kMaxPointsPerVoxel) ok = false;

  // Down-sampled sweeps never keep two points in one 0.5 m voxel.
  Sweep sweep;
  sweep.t_b = 0.0;
  sweep.t_e = 0.1;
  for (int i = 0; i < 10000; ++i)
    sweep.points.push_back({rng.vec3(3.0), 0.1 * i / 9999.0});
  const Sweep down = downsample(sweep, 0.5);
  std::unordered_map<VoxelKey, int, VoxelKeyHash> counts;
  for (const TimedPoint &p : down.points) ++counts[voxel_key_of(p.p, 0.5)];
  for (const auto &[key, n] : counts)
    if (n > 1) ok = false;
  report(7, ok, "map cap (<= 20/voxel) and downsample cap (<= 1/voxel) held "
                "over 10^4 random ops");
}

// 9. Byte-identical trajectory and map files across repeated runs.
void criterion_9() {
  namespace fs = std::filesystem;
  const fs::path dir =
      fs::temp_directory_path() / ("liwo_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const SimOutput sim = simulate(default_sim_config(straight_script()),
                                 benchmark_world(), nominal_noise(), 17);
  auto emit = [&](const std::string &tag) {
    const PipelineResult res =
        run_pipeline(sim.imu, sim.wheel, sim.sweeps, PipelineConfig{});
    write_trajectory((dir / ("traj_" + tag + ".csv")).string(), res.trajectory);
    write_ply((dir / ("map_" + tag + ".ply")).string(), res.map_points);
  };
  emit("a");
  emit("b");
  auto slurp = [](const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
  };
  const bool ok = slurp(dir / "traj_a.csv") == slurp(dir / "traj_b.csv") &&
                  slurp(dir / "map_a.ply") == slurp(dir / "map_b.ply") &&
                  !slurp(dir / "traj_a.csv").empty();
  fs::remove_all(dir);
  report(9, ok, "determinism: repeated runs write byte-identical trajectory "
                "and map files");
}

// 10. ATE tool: exact zeros and the Monte-Carlo noise band.
void criterion_10() {
  std::vector<TrajectoryRecord> truth;
  for (int i = 0; i < 1000; ++i) {
    TrajectoryRecord r;
    r.index = i;
    r.stamp = 0.1 * i;
    const double s = 0.05 * i;
    r.t = Vec3(10.0 * std::cos(s), 10.0 * std::sin(s), 0.002 * i);
    r.q = so3_exp(Vec3(0.0, 0.0, s));
    truth.push_back(r);
  }
  const double e_ident = evaluate_ate(truth, truth);

  const Quat q_off = so3_exp(Vec3(0.4, -0.1, 0.9));
  const Vec3 t_off(12.0, -3.0, 5.0);
  auto rigid = truth;
  for (TrajectoryRecord &r : rigid) {
    r.t = q_off * r.t + t_off;
    r.q = (q_off * r.q).normalized();
  }
  const double e_rigid = evaluate_ate(rigid, truth);

  std::mt19937_64 gen(2026);
  std::normal_distribution<double> n01(0.0, 1.0);
  auto noisy = truth;
  for (TrajectoryRecord &r : noisy)
    r.t += 0.1 * Vec3(n01(gen), n01(gen), n01(gen));
  const double e_mc = evaluate_ate(noisy, truth);

  const bool ok = e_ident < 1e-12 && e_rigid < 1e-9 && e_mc > 0.15 &&
                  e_mc < 0.20;
  report(10, ok, "ate tool: identical " + fmt(e_ident) +
                     " (< 1e-12), rigid offset " + fmt(e_rigid) +
                     " (< 1e-9), sigma 0.1 Monte-Carlo " + fmt(e_mc) +
                     " (in [0.15, 0.20])");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criteria_4_and_8();
  criteria_5_and_6();
  criterion_7();
  criterion_9();
  criterion_10();
  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria FAILED\n", g_failures);
  return 1;
}
