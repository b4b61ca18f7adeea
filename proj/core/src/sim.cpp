#include "comot/sim.hpp"

#include "comot/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

namespace comot {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) {
  throw ConfigError(ErrorCode::ConfigParse, "scenario: " + msg);
}

double number(const json& j, const std::string& key) {
  if (!j.is_number()) bad("'" + key + "' must be a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& key) {
  if (!j.is_number_integer()) bad("'" + key + "' must be an integer");
  return j.get<int>();
}

SimAgent parse_agent(const json& j) {
  if (!j.is_object()) bad("every agent must be an object");
  SimAgent a;
  for (const auto& [key, v] : j.items()) {
    if (key == "id") {
      if (!v.is_string()) bad("agent 'id' must be a string");
      a.id = v.get<std::string>();
    } else if (key == "x") {
      a.x = number(v, key);
    } else if (key == "y") {
      a.y = number(v, key);
    } else if (key == "sigma") {
      a.sigma = number(v, key);
    } else if (key == "dropout") {
      a.dropout = number(v, key);
    } else if (key == "occlusion") {
      if (!v.is_array()) bad("'occlusion' must be an array of [start, end] pairs");
      for (const auto& s : v) {
        if (!s.is_array() || s.size() != 2) bad("occlusion sectors are [start, end] pairs");
        a.occlusion.push_back(Sector{number(s[0], "occlusion"), number(s[1], "occlusion")});
      }
    } else {
      throw ConfigError(ErrorCode::UnknownKey, "scenario: unknown agent key '" + key + "'");
    }
  }
  return a;
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

struct ObjectTrack {
  double offset = 0.0;  // across-lane coordinate in the layout frame
  double start = 0.0;   // along-lane coordinate at frame 0
  double speed = 0.0;   // signed, m/frame
};

}  // namespace

bool Sector::contains(double bearing) const noexcept {
  const double b = wrap_angle(bearing);
  const double s = wrap_angle(start);
  const double e = wrap_angle(end);
  if (s <= e) return b >= s && b < e;
  return b >= s || b < e;
}

ScenarioConfig ScenarioConfig::two_agent_default() {
  ScenarioConfig cfg;
  cfg.agents = {SimAgent{"agent_i", 0.0, -25.0, 0.0, 0.0, {}},
                SimAgent{"agent_j", 0.0, 25.0, 0.0, 0.0, {}}};
  return cfg;
}

void ScenarioConfig::validate() const {
  if (num_objects < 0) bad("num_objects must be >= 0");
  if (num_frames < 1) bad("num_frames must be >= 1");
  if (!(speed_min >= 0.0 && speed_min <= speed_max)) bad("need 0 <= speed_min <= speed_max");
  if (!(world_extent > 0.0)) bad("world_extent must be positive");
  if (!(length > 0.0 && width > 0.0 && height > 0.0)) bad("object extents must be positive");
  if (!(lane_width >= width + 2.0)) bad("lane_width must leave at least 2 m between objects");
  if (!(score_base >= 0.0 && score_base <= 1.0)) bad("score_base must lie in [0,1]");
  if (!(score_jitter >= 0.0)) bad("score_jitter must be >= 0");
  if (!std::isfinite(layout_yaw)) bad("layout_yaw must be finite");
  if (agents.empty()) bad("at least one agent is required");
  std::set<std::string> ids;
  for (const auto& a : agents) {
    if (a.id.empty()) bad("agent ids must be non-empty");
    if (!ids.insert(a.id).second) bad("duplicate agent id '" + a.id + "'");
    if (!(a.sigma >= 0.0)) bad("sigma must be >= 0");
    if (!(a.dropout >= 0.0 && a.dropout <= 1.0)) bad("dropout must lie in [0,1]");
    if (!std::isfinite(a.x) || !std::isfinite(a.y)) bad("agent position must be finite");
  }
}

ScenarioConfig parse_scenario(const json& j) {
  if (!j.is_object()) bad("top level must be a JSON object");
  ScenarioConfig cfg = ScenarioConfig::two_agent_default();
  for (const auto& [key, v] : j.items()) {
    if (key == "num_objects") cfg.num_objects = integer(v, key);
    else if (key == "num_frames") cfg.num_frames = integer(v, key);
    else if (key == "speed_min") cfg.speed_min = number(v, key);
    else if (key == "speed_max") cfg.speed_max = number(v, key);
    else if (key == "world_extent") cfg.world_extent = number(v, key);
    else if (key == "lane_width") cfg.lane_width = number(v, key);
    else if (key == "layout_yaw") cfg.layout_yaw = number(v, key);
    else if (key == "score_base") cfg.score_base = number(v, key);
    else if (key == "score_jitter") cfg.score_jitter = number(v, key);
    else if (key == "length") cfg.length = number(v, key);
    else if (key == "width") cfg.width = number(v, key);
    else if (key == "height") cfg.height = number(v, key);
    else if (key == "seed") {
      if (!v.is_number_unsigned()) bad("'seed' must be a non-negative integer");
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "agents") {
      if (!v.is_array()) bad("'agents' must be an array");
      cfg.agents.clear();
      for (const auto& a : v) cfg.agents.push_back(parse_agent(a));
    } else {
      throw ConfigError(ErrorCode::UnknownKey, "scenario: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

json to_json(const ScenarioConfig& cfg) {
  json agents = json::array();
  for (const auto& a : cfg.agents) {
    json occ = json::array();
    for (const auto& s : a.occlusion) occ.push_back(json::array({s.start, s.end}));
    agents.push_back(json{{"id", a.id},
                          {"x", a.x},
                          {"y", a.y},
                          {"sigma", a.sigma},
                          {"dropout", a.dropout},
                          {"occlusion", occ}});
  }
  return json{{"num_objects", cfg.num_objects},
              {"num_frames", cfg.num_frames},
              {"speed_min", cfg.speed_min},
              {"speed_max", cfg.speed_max},
              {"world_extent", cfg.world_extent},
              {"lane_width", cfg.lane_width},
              {"layout_yaw", cfg.layout_yaw},
              {"score_base", cfg.score_base},
              {"score_jitter", cfg.score_jitter},
              {"length", cfg.length},
              {"width", cfg.width},
              {"height", cfg.height},
              {"seed", cfg.seed},
              {"agents", agents}};
}

Scenario generate(const ScenarioConfig& cfg) {
  cfg.validate();
  std::mt19937_64 layout_rng = make_rng(cfg.seed, 0);
  std::vector<ObjectTrack> objects(static_cast<std::size_t>(cfg.num_objects));
  {
    std::uniform_real_distribution<double> start(-0.5 * cfg.world_extent, 0.5 * cfg.world_extent);
    std::uniform_real_distribution<double> speed(cfg.speed_min, cfg.speed_max);
    std::bernoulli_distribution forward(0.5);
    const double centre = 0.5 * static_cast<double>(cfg.num_objects - 1);
    for (std::size_t k = 0; k < objects.size(); ++k) {
      objects[k].offset = (static_cast<double>(k) - centre) * cfg.lane_width;
      objects[k].start = start(layout_rng);
      const double s = speed(layout_rng);
      objects[k].speed = forward(layout_rng) ? s : -s;
    }
  }

  const double c = std::cos(cfg.layout_yaw);
  const double s = std::sin(cfg.layout_yaw);
  auto gt_box = [&](const ObjectTrack& o, int frame) {
    const double along = o.start + o.speed * frame;
    Box b;
    b.x = c * along - s * o.offset;
    b.y = s * along + c * o.offset;
    b.z = 0.5 * cfg.height;
    b.theta = wrap_angle(cfg.layout_yaw + (o.speed < 0.0 ? kPi : 0.0));
    b.h = cfg.height;
    b.w = cfg.width;
    b.l = cfg.length;
    return b;
  };

  Scenario sc;
  sc.gt.resize(static_cast<std::size_t>(cfg.num_frames));
  sc.bundles.resize(static_cast<std::size_t>(cfg.num_frames));
  for (int f = 0; f < cfg.num_frames; ++f) {
    auto& g = sc.gt[static_cast<std::size_t>(f)];
    g.frame = f;
    for (std::size_t k = 0; k < objects.size(); ++k) {
      g.objects.push_back(LabeledBox{static_cast<ObjectId>(k + 1), gt_box(objects[k], f)});
    }
    auto& bundle = sc.bundles[static_cast<std::size_t>(f)];
    bundle.frame = f;
    for (const auto& a : cfg.agents) bundle.agents.push_back(AgentDetections{a.id, {}});
  }

  for (std::size_t ai = 0; ai < cfg.agents.size(); ++ai) {
    const SimAgent& agent = cfg.agents[ai];
    std::mt19937_64 rng = make_rng(cfg.seed, ai + 1);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int f = 0; f < cfg.num_frames; ++f) {
      auto& dets = sc.bundles[static_cast<std::size_t>(f)].agents[ai].detections;
      for (const auto& truth : sc.gt[static_cast<std::size_t>(f)].objects) {
        // Draw every variate up front so the stream does not depend on visibility.
        const double drop = unit(rng);
        const double nx = noise(rng), ny = noise(rng), nz = noise(rng);
        const double jitter = unit(rng);
        const double bearing = std::atan2(truth.box.y - agent.y, truth.box.x - agent.x);
        const bool occluded = std::any_of(agent.occlusion.begin(), agent.occlusion.end(),
                                          [&](const Sector& sec) { return sec.contains(bearing); });
        if (occluded || drop < agent.dropout) continue;
        Detection d;
        d.box = truth.box;
        d.box.x += agent.sigma * nx;
        d.box.y += agent.sigma * ny;
        d.box.z += agent.sigma * nz;
        d.score = std::clamp(cfg.score_base + cfg.score_jitter * (2.0 * jitter - 1.0), 0.0, 1.0);
        d.agent_id = agent.id;
        d.frame = f;
        d.local_index = dets.size();
        dets.push_back(std::move(d));
      }
    }
  }
  return sc;
}

std::vector<AgentNoiseStats> noise_stats(const std::vector<GtFrame>& gt,
                                         const std::vector<FrameBundle>& bundles) {
  std::map<std::int64_t, const GtFrame*> gt_by_frame;
  for (const auto& g : gt) gt_by_frame[g.frame] = &g;

  std::vector<AgentNoiseStats> stats;
  std::vector<std::array<double, 3>> sums;
  auto slot = [&](const std::string& id) -> std::size_t {
    for (std::size_t i = 0; i < stats.size(); ++i) {
      if (stats[i].agent_id == id) return i;
    }
    stats.push_back(AgentNoiseStats{id});
    sums.push_back({0.0, 0.0, 0.0});
    return stats.size() - 1;
  };

  for (const auto& bundle : bundles) {
    const auto it = gt_by_frame.find(bundle.frame);
    for (const auto& agent : bundle.agents) {
      const std::size_t i = slot(agent.agent_id);
      if (it == gt_by_frame.end() || it->second->objects.empty()) continue;
      for (const auto& d : agent.detections) {
        double best = std::numeric_limits<double>::infinity();
        const Box* nearest = nullptr;
        for (const auto& o : it->second->objects) {
          const double dx = d.box.x - o.box.x, dy = d.box.y - o.box.y, dz = d.box.z - o.box.z;
          const double dist = dx * dx + dy * dy + dz * dz;
          if (dist < best) {
            best = dist;
            nearest = &o.box;
          }
        }
        sums[i][0] += (d.box.x - nearest->x) * (d.box.x - nearest->x);
        sums[i][1] += (d.box.y - nearest->y) * (d.box.y - nearest->y);
        sums[i][2] += (d.box.z - nearest->z) * (d.box.z - nearest->z);
        ++stats[i].samples;
      }
    }
  }
  for (std::size_t i = 0; i < stats.size(); ++i) {
    if (stats[i].samples == 0) continue;
    const double n = static_cast<double>(stats[i].samples);
    stats[i].rmse_x = std::sqrt(sums[i][0] / n);
    stats[i].rmse_y = std::sqrt(sums[i][1] / n);
    stats[i].rmse_z = std::sqrt(sums[i][2] / n);
    stats[i].rmse_3d = std::sqrt((sums[i][0] + sums[i][1] + sums[i][2]) / n);
  }
  return stats;
}

}  // namespace comot
