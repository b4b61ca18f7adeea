#pragma once

#include "comot/config.hpp"
#include "comot/types.hpp"

namespace comot {

/// Constant-velocity linear model over [x y z theta h w l vx vy vz] with
/// box measurements [x y z theta h w l].
struct KalmanModel {
  Matrix10 F = Matrix10::Identity();
  Matrix7x10 H = Matrix7x10::Zero();
  Matrix10 Q = Matrix10::Zero();
  Matrix7 R = Matrix7::Identity();
  Matrix10 P0 = Matrix10::Identity();
  /// Flip the measured heading by pi when it disagrees with the prediction by
  /// more than pi/2; boxes are symmetric under a half turn.
  bool orientation_correction = true;

  static KalmanModel from_params(const KalmanParams& params);
};

/// New tentative track at the detection box with zero velocity and covariance P0.
TrackState init_track(const Detection& d, TrackId id, const KalmanModel& model);

/// x <- F x, P <- F P F^T + Q, heading re-wrapped.
TrackState predict(const TrackState& track, const KalmanModel& model);

/// Innovation z - Hx with the heading component wrapped. When orientation
/// correction is enabled the result lies in [-pi/2, pi/2] for the heading.
Vector7 innovation(const TrackState& track, const Vector7& z, const KalmanModel& model);

/// Measurement correction only: gain, state and covariance. Lifecycle
/// counters are left untouched. Throws SingularInnovation when HPH^T + R is
/// not positive definite.
TrackState correct(const TrackState& track, const Vector7& z, const KalmanModel& model);

/// correct() followed by the bookkeeping of an associated measurement:
/// hits + 1, misses reset, score taken from the measurement.
TrackState update(const TrackState& track, const Vector7& z, double score,
                  const KalmanModel& model);

}  // namespace comot
