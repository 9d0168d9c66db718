// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/kalman.hpp"

#include <cmath>

#include "flocktrack/error.hpp"

namespace flocktrack {

namespace {

constexpr double kMaxCondition = 1e12;

Eigen::Matrix4d transition() {
  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 2) = 1.0;
  f(1, 3) = 1.0;
  return f;
}

Eigen::Matrix<double, 2, 4> projection() {
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  return h;
}

Eigen::Matrix2d measurement_noise(double height, const MotionConfig& cfg) {
  const double sd =
      cfg.measurement_noise_scale * cfg.std_weight_measurement * height;
  return Eigen::Vector2d::Constant(sd * sd).asDiagonal();
}

Eigen::Matrix4d symmetrized(const Eigen::Matrix4d& m) {
  return 0.5 * (m + m.transpose());
}

double condition_number(const Eigen::Matrix2d& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(s);
  const auto& ev = eig.eigenvalues();
  if (ev(0) <= 0.0) return INFINITY;
  return ev(1) / ev(0);
}

}  // namespace

KalmanState kalman_initiate(Point z, double height, const MotionConfig& cfg) {
  KalmanState s;
  s.mean << z.x, z.y, 0.0, 0.0;
  const double sp = cfg.std_weight_position * height;
  const double sv = cfg.std_weight_velocity * height;
  s.covariance = Eigen::Vector4d(sp * sp, sp * sp, sv * sv, sv * sv).asDiagonal();
  return s;
}

KalmanState kalman_predict(const KalmanState& s, double height,
                           const MotionConfig& cfg) {
  const double sp = cfg.process_noise_scale * cfg.std_weight_position * height;
  const double sv = cfg.process_noise_scale * cfg.std_weight_velocity * height;
  const Eigen::Matrix4d q =
      Eigen::Vector4d(sp * sp, sp * sp, sv * sv, sv * sv).asDiagonal();
  const Eigen::Matrix4d f = transition();
  KalmanState out;
  out.mean = f * s.mean;
  out.covariance = symmetrized(f * s.covariance * f.transpose() + q);
  return out;
}

Eigen::Matrix2d innovation_covariance(const KalmanState& s, double height,
                                      const MotionConfig& cfg) {
  const auto h = projection();
  return h * s.covariance * h.transpose() + measurement_noise(height, cfg);
}

KalmanState kalman_update(const KalmanState& s, Point z, double height,
                          const MotionConfig& cfg) {
  const auto h = projection();
  const Eigen::Matrix2d innov_cov = innovation_covariance(s, height, cfg);
  if (condition_number(innov_cov) > kMaxCondition) {
    throw Error(ErrorCode::kDegenerateCovariance,
                "innovation covariance is numerically singular");
  }
  const Eigen::Vector2d innovation = Eigen::Vector2d(z.x, z.y) - h * s.mean;
  // K = P H^T S^-1, computed as a solve against the SPD S.
  const Eigen::Matrix<double, 4, 2> pht = s.covariance * h.transpose();
  const Eigen::Matrix<double, 4, 2> gain =
      innov_cov.llt().solve(pht.transpose()).transpose();

  KalmanState out;
  out.mean = s.mean + gain * innovation;
  out.covariance =
      symmetrized(s.covariance - gain * innov_cov * gain.transpose());
  return out;
}

double mahalanobis_squared(const KalmanState& s, Point z, double height,
                           const MotionConfig& cfg) {
  const Eigen::Matrix2d innov_cov = innovation_covariance(s, height, cfg);
  if (condition_number(innov_cov) > kMaxCondition) {
    throw Error(ErrorCode::kDegenerateCovariance,
                "innovation covariance is numerically singular");
  }
  const Eigen::Vector2d d(z.x - s.mean(0), z.y - s.mean(1));
  return d.dot(innov_cov.llt().solve(d));
}

bool is_spd(const Eigen::Matrix4d& m) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(m);
  return eig.eigenvalues().minCoeff() > 0.0;
}

}  // namespace flocktrack
