#include "comot/kalman.hpp"

#include "comot/error.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace comot {

KalmanModel KalmanModel::from_params(const KalmanParams& params) {
  KalmanModel m;
  m.F = Matrix10::Identity();
  m.F(0, 7) = 1.0;
  m.F(1, 8) = 1.0;
  m.F(2, 9) = 1.0;
  m.H.setZero();
  m.H.leftCols<7>().setIdentity();

  Vector10 q;
  q.head<7>().setConstant(params.q_box);
  q.tail<3>().setConstant(params.q_velocity);
  m.Q = q.asDiagonal();

  Vector10 p0;
  p0.head<7>().setConstant(params.p0_box);
  p0.tail<3>().setConstant(params.p0_velocity);
  m.P0 = p0.asDiagonal();

  m.R = Matrix7::Identity() * params.r_box;
  return m;
}

TrackState init_track(const Detection& d, TrackId id, const KalmanModel& model) {
  TrackState t;
  t.state.setZero();
  t.state.head<7>() = d.box.as_vector();
  t.state[3] = wrap_angle(t.state[3]);
  t.covariance = model.P0;
  t.track_id = id;
  t.hits = 1;
  t.misses = 0;
  t.status = TrackStatus::Tentative;
  t.score = d.score;
  return t;
}

TrackState predict(const TrackState& track, const KalmanModel& model) {
  TrackState out = track;
  out.state = model.F * track.state;
  out.state[3] = wrap_angle(out.state[3]);
  Matrix10 p = model.F * track.covariance * model.F.transpose() + model.Q;
  out.covariance = 0.5 * (p + p.transpose());
  return out;
}

Vector7 innovation(const TrackState& track, const Vector7& z, const KalmanModel& model) {
  Vector7 r = z - model.H * track.state;
  r[3] = wrap_angle(r[3]);
  if (model.orientation_correction && std::abs(r[3]) > 0.5 * kPi) {
    r[3] = wrap_angle(r[3] + kPi);
  }
  return r;
}

TrackState correct(const TrackState& track, const Vector7& z, const KalmanModel& model) {
  const Matrix10& p = track.covariance;
  const Matrix7 s = model.H * p * model.H.transpose() + model.R;
  const Eigen::LLT<Matrix7> llt(s);
  if (llt.info() != Eigen::Success) {
    throw SingularInnovation("innovation covariance is not positive definite");
  }
  // K = P H^T S^-1, computed as (S^-1 H P)^T since S and P are symmetric.
  const Eigen::Matrix<double, 10, 7> gain = llt.solve(model.H * p).transpose();

  TrackState out = track;
  out.state = track.state + gain * innovation(track, z, model);
  out.state[3] = wrap_angle(out.state[3]);
  Matrix10 updated = p - gain * model.H * p;
  out.covariance = 0.5 * (updated + updated.transpose());
  return out;
}

TrackState update(const TrackState& track, const Vector7& z, double score,
                  const KalmanModel& model) {
  TrackState out = correct(track, z, model);
  out.hits = track.hits + 1;
  out.misses = 0;
  out.score = score;
  return out;
}

}  // namespace comot
