// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "flocktrack/error.hpp"
#include "flocktrack/kalman.hpp"
#include "flocktrack/track.hpp"

using namespace flocktrack;

namespace {

// Independent per-axis filter: the 4-D model is two uncoupled
// (position, velocity) pairs, so a scalar 2x2 transcription must agree.
struct Axis {
  double x, v, pxx, pxv, pvv;
};

Axis axis_predict(Axis a, double qp, double qv) {
  return {a.x + a.v, a.v, a.pxx + 2 * a.pxv + a.pvv + qp, a.pxv + a.pvv, a.pvv + qv};
}

Axis axis_update(Axis a, double z, double r) {
  const double s = a.pxx + r;
  const double kx = a.pxx / s, kv = a.pxv / s;
  const double y = z - a.x;
  return {a.x + kx * y, a.v + kv * y, a.pxx - kx * a.pxx, a.pxv - kx * a.pxv,
          a.pvv - kv * a.pxv};
}

}  // namespace

TEST(Kalman, AgreesWithScalarTranscription) {
  const MotionConfig cfg;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-20.0, 20.0), h(20.0, 80.0);
  const double h0 = 44.0;
  KalmanState s = kalman_initiate({100, 200}, h0, cfg);
  const double sp0 = cfg.std_weight_position * h0, sv0 = cfg.std_weight_velocity * h0;
  Axis ax{100, 0, sp0 * sp0, 0, sv0 * sv0}, ay{200, 0, sp0 * sp0, 0, sv0 * sv0};
  for (int i = 0; i < 200; ++i) {
    const double height = h(rng);
    const double sp = cfg.std_weight_position * height, sv = cfg.std_weight_velocity * height;
    s = kalman_predict(s, height, cfg);
    ax = axis_predict(ax, sp * sp, sv * sv);
    ay = axis_predict(ay, sp * sp, sv * sv);
    const Point z{ax.x + u(rng), ay.x + u(rng)};
    const double r = std::pow(cfg.std_weight_measurement * height, 2);
    s = kalman_update(s, z, height, cfg);
    ax = axis_update(ax, z.x, r);
    ay = axis_update(ay, z.y, r);
    ASSERT_NEAR(s.mean(0), ax.x, 1e-8);
    ASSERT_NEAR(s.mean(1), ay.x, 1e-8);
    ASSERT_NEAR(s.mean(2), ax.v, 1e-8);
    ASSERT_NEAR(s.covariance(0, 0), ax.pxx, 1e-8);
    ASSERT_NEAR(s.covariance(0, 2), ax.pxv, 1e-8);
    ASSERT_NEAR(s.covariance(3, 3), ay.pvv, 1e-8);
    ASSERT_NEAR(s.covariance(0, 1), 0.0, 1e-12);
  }
}

TEST(Kalman, NoiselessConstantVelocityConverges) {
  MotionConfig cfg;
  cfg.measurement_noise_scale = 1e-6;
  KalmanState s = kalman_initiate({0, 0}, 40, cfg);
  Point z;
  for (int k = 1; k <= 10; ++k) {
    z = {2.0 * k, -1.5 * k};
    s = kalman_update(kalman_predict(s, 40, cfg), z, 40, cfg);
  }
  EXPECT_LT(std::hypot(s.mean(0) - z.x, s.mean(1) - z.y), 1e-6);
}

TEST(Kalman, CovarianceStaysSpd) {
  const MotionConfig cfg;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> p(0, 1000), h(5, 300);
  KalmanState s = kalman_initiate({500, 500}, 50, cfg);
  for (int i = 0; i < 5000; ++i) {
    s = (rng() & 1) ? kalman_predict(s, h(rng), cfg) : kalman_update(s, {p(rng), p(rng)}, h(rng), cfg);
    ASSERT_TRUE(is_spd(s.covariance)) << "step " << i;
  }
}

TEST(Kalman, MahalanobisOfPredictionIsZero) {
  const MotionConfig cfg;
  const KalmanState s = kalman_predict(kalman_initiate({10, 20}, 30, cfg), 30, cfg);
  EXPECT_EQ(mahalanobis_squared(s, {10, 20}, 30, cfg), 0.0);
  // One standard deviation along x.
  const double sx = std::sqrt(innovation_covariance(s, 30, cfg)(0, 0));
  EXPECT_NEAR(mahalanobis_squared(s, {10 + sx, 20}, 30, cfg), 1.0, 1e-12);
}

TEST(Kalman, DegenerateInnovationThrows) {
  MotionConfig cfg;
  cfg.measurement_noise_scale = 0.0;
  KalmanState s;
  s.covariance = Eigen::Matrix4d::Identity();
  s.covariance(1, 1) = 1e-20;
  try {
    kalman_update(s, {1, 1}, 40, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateCovariance);
  }
}

TEST(TrackLifecycle, ConfirmAndDelete) {
  MotionConfig cfg;
  Detection d{0, {100, 100, 60, 44}};
  Track t = initiate(d, 1, cfg);
  EXPECT_TRUE(t.tentative());
  for (int i = 1; i < cfg.confirm_hits; ++i) t = update(predict(t, cfg), d, cfg);
  EXPECT_TRUE(t.confirmed());
  for (int i = 0; i < cfg.max_age; ++i) t = mark_missed(predict(t, cfg), cfg.max_age);
  EXPECT_TRUE(t.confirmed());
  t = mark_missed(predict(t, cfg), cfg.max_age);
  EXPECT_TRUE(t.deleted());

  Track tentative = initiate(d, 2, cfg);
  EXPECT_TRUE(mark_missed(predict(tentative, cfg), cfg.max_age).deleted());
}
