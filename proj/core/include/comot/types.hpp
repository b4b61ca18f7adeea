#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace comot {

using Vector7 = Eigen::Matrix<double, 7, 1>;
using Vector10 = Eigen::Matrix<double, 10, 1>;
using Matrix7 = Eigen::Matrix<double, 7, 7>;
using Matrix10 = Eigen::Matrix<double, 10, 10>;
using Matrix7x10 = Eigen::Matrix<double, 7, 10>;

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into [-pi, pi).
double wrap_angle(double angle) noexcept;

/// Yaw-oriented 3D box: centroid, heading about +z, and extents.
/// `l` runs along the heading, `w` across it, `h` along z.
struct Box {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double theta = 0.0;
  double h = 1.0;
  double w = 1.0;
  double l = 1.0;

  Vector7 as_vector() const;
  static Box from_vector(const Eigen::Ref<const Vector7>& v);

  double volume() const noexcept { return h * w * l; }

  friend bool operator==(const Box&, const Box&) = default;
};

struct Detection {
  Box box;
  double score = 1.0;
  std::string agent_id;
  std::int64_t frame = 0;
  std::size_t local_index = 0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Returns `d` with theta wrapped; throws InvalidBox on non-finite fields,
/// non-positive extents, a score outside [0,1] or a negative frame.
Detection validate_detection(Detection d);

enum class TrackStatus { Tentative, Confirmed, Dead };

std::string_view to_string(TrackStatus status) noexcept;

using TrackId = std::uint64_t;

struct TrackState {
  Vector10 state = Vector10::Zero();  // [x y z theta h w l vx vy vz], velocities in m/frame
  Matrix10 covariance = Matrix10::Identity();
  TrackId track_id = 0;
  int hits = 0;
  int misses = 0;
  TrackStatus status = TrackStatus::Tentative;
  double score = 0.0;

  Box box() const { return Box::from_vector(state.head<7>()); }
};

struct AgentDetections {
  std::string agent_id;
  std::vector<Detection> detections;

  friend bool operator==(const AgentDetections&, const AgentDetections&) = default;
};

/// All detections of one frame, grouped per agent in a stable agent order.
struct FrameBundle {
  std::int64_t frame = 0;
  std::vector<AgentDetections> agents;

  /// Detections of `agent_id`, creating an empty entry at the back when absent.
  std::vector<Detection>& detections_of(const std::string& agent_id);
  std::size_t detection_count() const noexcept;

  friend bool operator==(const FrameBundle&, const FrameBundle&) = default;
};

}  // namespace comot
