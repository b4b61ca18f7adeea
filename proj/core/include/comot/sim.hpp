#pragma once

#include "comot/metrics.hpp"
#include "comot/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace comot {

/// Half-open bearing interval [start, end) in radians, measured from the
/// agent's position in the world frame; wraps through +-pi when start > end.
struct Sector {
  double start = 0.0;
  double end = 0.0;

  bool contains(double bearing) const noexcept;
};

struct SimAgent {
  std::string id;
  double x = 0.0;
  double y = 0.0;
  double sigma = 0.0;    // centroid noise per axis, m
  double dropout = 0.0;  // per-object per-frame miss probability
  std::vector<Sector> occlusion;
};

struct ScenarioConfig {
  int num_objects = 10;
  int num_frames = 100;
  double speed_min = 0.3;  // m/frame
  double speed_max = 1.2;
  double world_extent = 60.0;  // objects start within +-extent/2 along their lane
  double lane_width = 4.0;
  double layout_yaw = 0.0;  // rotation of the whole lane layout about the origin
  double score_base = 0.8;
  double score_jitter = 0.15;
  double length = 4.5;
  double width = 1.8;
  double height = 1.6;
  std::uint64_t seed = 7;
  std::vector<SimAgent> agents;

  /// Two agents on either side of the road, no noise, no occlusion.
  static ScenarioConfig two_agent_default();
  /// Throws ConfigError(ConfigParse) on an invalid configuration.
  void validate() const;
};

ScenarioConfig parse_scenario(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& cfg);

struct Scenario {
  std::vector<GtFrame> gt;
  std::vector<FrameBundle> bundles;
};

/// Objects drive along parallel lanes (one per object, lane_width apart) at
/// constant velocity with heading along the velocity. Each agent observes each
/// object unless it falls in an occlusion sector or is dropped; observed
/// centroids get independent Gaussian noise. Deterministic per seed.
Scenario generate(const ScenarioConfig& cfg);

struct AgentNoiseStats {
  std::string agent_id;
  std::int64_t samples = 0;
  double rmse_x = 0.0;
  double rmse_y = 0.0;
  double rmse_z = 0.0;
  double rmse_3d = 0.0;
};

/// Centroid RMSE of every agent's detections against the nearest GT object of the same frame.
std::vector<AgentNoiseStats> noise_stats(const std::vector<GtFrame>& gt,
                                         const std::vector<FrameBundle>& bundles);

}  // namespace comot
