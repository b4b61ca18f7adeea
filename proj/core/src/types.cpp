#include "comot/types.hpp"

#include "comot/error.hpp"

#include <cmath>
#include <sstream>

namespace comot {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidBox: return "InvalidBox";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::NonFiniteCost: return "NonFiniteCost";
    case ErrorCode::SingularInnovation: return "SingularInnovation";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::NoGroundTruth: return "NoGroundTruth";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::FrameOrderError: return "FrameOrderError";
    case ErrorCode::MissingPose: return "MissingPose";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

double wrap_angle(double angle) noexcept {
  if (angle >= -kPi && angle < kPi) return angle;
  constexpr double two_pi = 2.0 * kPi;
  double wrapped = std::fmod(angle + kPi, two_pi);
  if (wrapped < 0.0) wrapped += two_pi;
  wrapped -= kPi;
  // fmod can land exactly on +pi after the shift back for inputs just below -pi.
  if (wrapped >= kPi) wrapped -= two_pi;
  return wrapped;
}

Vector7 Box::as_vector() const {
  Vector7 v;
  v << x, y, z, theta, h, w, l;
  return v;
}

Box Box::from_vector(const Eigen::Ref<const Vector7>& v) {
  return Box{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

Detection validate_detection(Detection d) {
  const Box& b = d.box;
  const double fields[] = {b.x, b.y, b.z, b.theta, b.h, b.w, b.l, d.score};
  for (double f : fields) {
    if (!std::isfinite(f)) throw InvalidBox("detection has a non-finite field");
  }
  if (b.h <= 0.0 || b.w <= 0.0 || b.l <= 0.0) {
    std::ostringstream os;
    os << "detection extent must be positive (h=" << b.h << ", w=" << b.w << ", l=" << b.l << ")";
    throw InvalidBox(os.str());
  }
  if (d.score < 0.0 || d.score > 1.0) throw InvalidBox("detection score outside [0,1]");
  if (d.frame < 0) throw InvalidBox("detection frame index is negative");
  d.box.theta = wrap_angle(b.theta);
  return d;
}

std::string_view to_string(TrackStatus status) noexcept {
  switch (status) {
    case TrackStatus::Tentative: return "tentative";
    case TrackStatus::Confirmed: return "confirmed";
    case TrackStatus::Dead: return "dead";
  }
  return "unknown";
}

std::vector<Detection>& FrameBundle::detections_of(const std::string& agent_id) {
  for (auto& a : agents) {
    if (a.agent_id == agent_id) return a.detections;
  }
  agents.push_back(AgentDetections{agent_id, {}});
  return agents.back().detections;
}

std::size_t FrameBundle::detection_count() const noexcept {
  std::size_t n = 0;
  for (const auto& a : agents) n += a.detections.size();
  return n;
}

}  // namespace comot
