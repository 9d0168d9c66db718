// SPDX-License-Identifier: Apache-2.0
//
// Constant-velocity Kalman filter over box centers. Only the position is
// measured; width and height are smoothed outside the filter and drive the
// noise magnitudes (DeepSort-style height-proportional noise).

#pragma once

#include <Eigen/Dense>

#include "flocktrack/types.hpp"

namespace flocktrack {

struct MotionConfig {
  int confirm_hits = 5;
  int max_age = 70;
  double std_weight_position = 1.0 / 20.0;
  double std_weight_velocity = 1.0 / 160.0;
  double std_weight_measurement = 1.0 / 20.0;
  // Multipliers applied to the process and measurement standard deviations.
  double process_noise_scale = 1.0;
  double measurement_noise_scale = 1.0;
  double size_smoothing = 0.3;  // EMA weight of the newest detection size
};

// mean = [cx, cy, vx, vy] in pixels and pixels/frame.
struct KalmanState {
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Identity();
};

KalmanState kalman_initiate(Point z, double height, const MotionConfig& cfg);
KalmanState kalman_predict(const KalmanState& s, double height,
                           const MotionConfig& cfg);
KalmanState kalman_update(const KalmanState& s, Point z, double height,
                          const MotionConfig& cfg);

// Innovation covariance S = H P H^T + R (2x2).
Eigen::Matrix2d innovation_covariance(const KalmanState& s, double height,
                                      const MotionConfig& cfg);

// Squared Mahalanobis distance of z from the projected state. Throws
// kDegenerateCovariance when cond(S) > 1e12.
double mahalanobis_squared(const KalmanState& s, Point z, double height,
                           const MotionConfig& cfg);

// Symmetric to 1e-9 and all eigenvalues strictly positive.
bool is_spd(const Eigen::Matrix4d& m);

}  // namespace flocktrack
