#include "comot/config.hpp"

#include "comot/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace comot {
namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& msg) {
  throw ConfigError(ErrorCode::ConfigParse, "config: " + msg);
}

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    parse_fail("key '" + key + "' has the wrong type");
  }
}

double get_number(const json& j, const std::string& key) {
  if (!j.is_number()) parse_fail("key '" + key + "' must be a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& key) {
  if (!j.is_number_integer()) parse_fail("key '" + key + "' must be an integer");
  return j.get<int>();
}

bool get_bool(const json& j, const std::string& key) {
  if (!j.is_boolean()) parse_fail("key '" + key + "' must be a boolean");
  return j.get<bool>();
}

KalmanParams parse_kalman(const json& j) {
  if (!j.is_object()) parse_fail("'kalman' must be an object");
  KalmanParams k;
  for (const auto& [key, value] : j.items()) {
    if (key == "p0_box") k.p0_box = get_number(value, key);
    else if (key == "p0_velocity") k.p0_velocity = get_number(value, key);
    else if (key == "q_box") k.q_box = get_number(value, key);
    else if (key == "q_velocity") k.q_velocity = get_number(value, key);
    else if (key == "r_box") k.r_box = get_number(value, key);
    else throw ConfigError(ErrorCode::UnknownKey, "config: unknown key 'kalman." + key + "'");
  }
  return k;
}

}  // namespace

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::Baseline: return "baseline";
    case Method::AOS: return "aos";
    case Method::TSA: return "tsa";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "baseline") return Method::Baseline;
  if (lower == "aos") return Method::AOS;
  if (lower == "tsa") return Method::TSA;
  return std::nullopt;
}

void TrackerConfig::validate() const {
  auto in_unit = [](double v) { return std::isfinite(v) && v > 0.0 && v <= 1.0; };
  if (!in_unit(iou_assoc_threshold)) parse_fail("iou_assoc_threshold must lie in (0,1]");
  if (!in_unit(cross_agent_iou_threshold)) parse_fail("cross_agent_iou_threshold must lie in (0,1]");
  if (min_hits < 1) parse_fail("min_hits must be >= 1");
  if (max_age < 1) parse_fail("max_age must be >= 1");
  const double noise[] = {kalman.p0_box, kalman.p0_velocity, kalman.q_box, kalman.q_velocity,
                          kalman.r_box};
  for (double v : noise) {
    if (!std::isfinite(v) || v < 0.0) parse_fail("kalman noise values must be finite and >= 0");
  }
}

TrackerConfig parse_config(const json& j) {
  if (!j.is_object()) parse_fail("top level must be a JSON object");
  TrackerConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "method") {
      if (!value.is_string()) parse_fail("'method' must be a string");
      auto m = parse_method(get_as<std::string>(value, key));
      if (!m) parse_fail("unknown method '" + value.get<std::string>() + "'");
      cfg.method = *m;
    } else if (key == "iou_assoc_threshold") {
      cfg.iou_assoc_threshold = get_number(value, key);
    } else if (key == "cross_agent_iou_threshold") {
      cfg.cross_agent_iou_threshold = get_number(value, key);
    } else if (key == "min_hits") {
      cfg.min_hits = get_int(value, key);
    } else if (key == "max_age") {
      cfg.max_age = get_int(value, key);
    } else if (key == "dedup_matched_pairs") {
      cfg.dedup_matched_pairs = get_bool(value, key);
    } else if (key == "warm_start") {
      cfg.warm_start = get_bool(value, key);
    } else if (key == "kalman") {
      cfg.kalman = parse_kalman(value);
    } else {
      throw ConfigError(ErrorCode::UnknownKey, "config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

TrackerConfig parse_config_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

TrackerConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json to_json(const TrackerConfig& cfg) {
  return json{
      {"method", std::string(to_string(cfg.method))},
      {"iou_assoc_threshold", cfg.iou_assoc_threshold},
      {"cross_agent_iou_threshold", cfg.cross_agent_iou_threshold},
      {"min_hits", cfg.min_hits},
      {"max_age", cfg.max_age},
      {"dedup_matched_pairs", cfg.dedup_matched_pairs},
      {"warm_start", cfg.warm_start},
      {"kalman",
       {{"p0_box", cfg.kalman.p0_box},
        {"p0_velocity", cfg.kalman.p0_velocity},
        {"q_box", cfg.kalman.q_box},
        {"q_velocity", cfg.kalman.q_velocity},
        {"r_box", cfg.kalman.r_box}}},
  };
}

}  // namespace comot
