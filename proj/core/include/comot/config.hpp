#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace comot {

enum class Method { Baseline, AOS, TSA };

std::string_view to_string(Method method) noexcept;
/// Accepts "baseline", "aos", "tsa" in any letter case.
std::optional<Method> parse_method(std::string_view name) noexcept;

/// Diagonal noise settings of the constant-velocity Kalman filter.
struct KalmanParams {
  double p0_box = 10.0;
  double p0_velocity = 1000.0;
  double q_box = 0.0;
  double q_velocity = 0.01;
  double r_box = 1.0;

  friend bool operator==(const KalmanParams&, const KalmanParams&) = default;
};

struct TrackerConfig {
  Method method = Method::TSA;
  double iou_assoc_threshold = 0.25;
  double cross_agent_iou_threshold = 0.25;
  int min_hits = 3;
  int max_age = 2;
  bool dedup_matched_pairs = false;
  bool warm_start = true;
  KalmanParams kalman;

  /// Throws ConfigError(ConfigParse) when an invariant is violated.
  void validate() const;

  friend bool operator==(const TrackerConfig&, const TrackerConfig&) = default;
};

/// Missing keys keep their defaults; unknown keys raise ConfigError(UnknownKey).
TrackerConfig parse_config(const nlohmann::json& j);
TrackerConfig parse_config_text(std::string_view text);
TrackerConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const TrackerConfig& cfg);

}  // namespace comot
