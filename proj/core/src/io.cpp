#include "comot/io.hpp"

#include "comot/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace comot {
namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct LineReader {
  fs::path path;
  std::size_t line = 0;

  [[noreturn]] void fail(const std::string& msg, ErrorCode code = ErrorCode::ParseError) const {
    throw DataError(code, path.string() + ":" + std::to_string(line) + ": " + msg, line);
  }

  double num(const json& j, const char* key) const {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number()) fail(std::string("missing or non-numeric '") + key + "'");
    return it->get<double>();
  }

  std::int64_t int64(const json& j, const char* key) const {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer()) fail(std::string("missing or non-integer '") + key + "'");
    return it->get<std::int64_t>();
  }

  std::string str(const json& j, const char* key) const {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) fail(std::string("missing or non-string '") + key + "'");
    return it->get<std::string>();
  }

  Box box(const json& j) const {
    return Box{num(j, "x"), num(j, "y"), num(j, "z"), num(j, "theta"),
               num(j, "h"), num(j, "w"), num(j, "l")};
  }

  std::int64_t frame(const json& j, std::int64_t& last) const {
    const std::int64_t f = int64(j, "frame");
    if (f < 0) fail("negative frame index");
    if (f < last) fail("frame " + std::to_string(f) + " follows frame " + std::to_string(last),
                       ErrorCode::FrameOrderError);
    last = f;
    return f;
  }
};

/// Calls `fn(reader, object)` for every non-blank line of `file`.
template <typename Fn>
void for_each_line(const fs::path& file, Fn&& fn) {
  std::ifstream in(file);
  if (!in) throw DataError(ErrorCode::Io, "cannot open '" + file.string() + "'");
  LineReader reader{file, 0};
  std::string text;
  while (std::getline(in, text)) {
    ++reader.line;
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
      continue;
    }
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      reader.fail(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) reader.fail("expected a JSON object");
    fn(reader, j);
  }
}

std::vector<fs::path> jsonl_files(const fs::path& path) {
  if (fs::is_regular_file(path)) return {path};
  if (!fs::is_directory(path)) {
    throw DataError(ErrorCode::Io, "no such file or directory: '" + path.string() + "'");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

void add_box(ordered_json& j, const Box& b) {
  j["x"] = b.x;
  j["y"] = b.y;
  j["z"] = b.z;
  j["theta"] = b.theta;
  j["h"] = b.h;
  j["w"] = b.w;
  j["l"] = b.l;
}

std::ofstream open_out(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(ErrorCode::Io, "cannot write '" + file.string() + "'");
  return out;
}

void write_detection_lines(std::ostream& out, const std::vector<FrameBundle>& bundles,
                           const std::string* only_agent) {
  for (const auto& b : bundles) {
    for (const auto& a : b.agents) {
      if (only_agent && a.agent_id != *only_agent) continue;
      for (const auto& d : a.detections) {
        ordered_json j;
        j["frame"] = b.frame;
        j["agent"] = a.agent_id;
        add_box(j, d.box);
        j["score"] = d.score;
        out << j.dump() << '\n';
      }
    }
  }
}

template <typename Frame>
std::vector<Frame> dense_frames(std::map<std::int64_t, Frame>&& by_frame) {
  std::vector<Frame> out;
  if (by_frame.empty()) return out;
  const std::int64_t last = by_frame.rbegin()->first;
  out.resize(static_cast<std::size_t>(last + 1));
  for (std::int64_t f = 0; f <= last; ++f) out[static_cast<std::size_t>(f)].frame = f;
  for (auto& [f, frame] : by_frame) out[static_cast<std::size_t>(f)] = std::move(frame);
  return out;
}

}  // namespace

Pose Pose::inverse() const {
  const double c = std::cos(yaw), s = std::sin(yaw);
  // R^T applied to -t.
  return Pose{-(c * x + s * y), -(-s * x + c * y), -z, -yaw};
}

Detection to_global(const Detection& d, const Pose& pose) {
  const double c = std::cos(pose.yaw), s = std::sin(pose.yaw);
  Detection out = d;
  out.box.x = c * d.box.x - s * d.box.y + pose.x;
  out.box.y = s * d.box.x + c * d.box.y + pose.y;
  out.box.z = d.box.z + pose.z;
  out.box.theta = wrap_angle(d.box.theta + pose.yaw);
  return out;
}

PoseTable read_poses(const fs::path& path) {
  PoseTable table;
  for (const auto& file : jsonl_files(path)) {
    std::int64_t last = 0;
    for_each_line(file, [&](const LineReader& r, const json& j) {
      const std::int64_t f = r.frame(j, last);
      Pose p{r.num(j, "x"), r.num(j, "y"), r.num(j, "z"), r.num(j, "yaw")};
      if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) || !std::isfinite(p.yaw)) {
        r.fail("non-finite pose");
      }
      p.yaw = wrap_angle(p.yaw);
      table[{f, r.str(j, "agent")}] = p;
    });
  }
  return table;
}

void write_poses(const fs::path& file, const PoseTable& poses) {
  auto out = open_out(file);
  for (const auto& [key, p] : poses) {
    ordered_json j;
    j["frame"] = key.first;
    j["agent"] = key.second;
    j["x"] = p.x;
    j["y"] = p.y;
    j["z"] = p.z;
    j["yaw"] = p.yaw;
    out << j.dump() << '\n';
  }
}

std::vector<FrameBundle> read_detections(const fs::path& path, const std::optional<fs::path>& poses) {
  std::optional<PoseTable> pose_table;
  if (poses) pose_table = read_poses(*poses);

  std::vector<std::string> agent_order;
  std::map<std::int64_t, FrameBundle> by_frame;
  for (const auto& file : jsonl_files(path)) {
    std::int64_t last = 0;
    for_each_line(file, [&](const LineReader& r, const json& j) {
      Detection d;
      d.frame = r.frame(j, last);
      d.agent_id = r.str(j, "agent");
      d.box = r.box(j);
      d.score = r.num(j, "score");
      try {
        d = validate_detection(std::move(d));
      } catch (const InvalidBox& e) {
        r.fail(e.what());
      }
      if (pose_table) {
        const auto it = pose_table->find({d.frame, d.agent_id});
        if (it == pose_table->end()) {
          r.fail("no pose for agent '" + d.agent_id + "' at frame " + std::to_string(d.frame),
                 ErrorCode::MissingPose);
        }
        d = to_global(d, it->second);
      }
      if (std::find(agent_order.begin(), agent_order.end(), d.agent_id) == agent_order.end()) {
        agent_order.push_back(d.agent_id);
      }
      FrameBundle& bundle = by_frame[d.frame];
      bundle.frame = d.frame;
      auto& list = bundle.detections_of(d.agent_id);
      d.local_index = list.size();
      list.push_back(std::move(d));
    });
  }

  std::vector<FrameBundle> frames = dense_frames(std::move(by_frame));
  for (auto& bundle : frames) {
    // Same agent order in every frame, empty lists included.
    std::vector<AgentDetections> ordered;
    ordered.reserve(agent_order.size());
    for (const auto& id : agent_order) ordered.push_back(AgentDetections{id, bundle.detections_of(id)});
    bundle.agents = std::move(ordered);
  }
  return frames;
}

void write_detections(const fs::path& file, const std::vector<FrameBundle>& bundles) {
  auto out = open_out(file);
  write_detection_lines(out, bundles, nullptr);
}

void write_detections_dir(const fs::path& dir, const std::vector<FrameBundle>& bundles) {
  fs::create_directories(dir);
  std::vector<std::string> agents;
  for (const auto& b : bundles) {
    for (const auto& a : b.agents) {
      if (std::find(agents.begin(), agents.end(), a.agent_id) == agents.end()) agents.push_back(a.agent_id);
    }
  }
  for (const auto& id : agents) {
    auto out = open_out(dir / (id + ".jsonl"));
    write_detection_lines(out, bundles, &id);
  }
}

std::vector<GtFrame> read_gt(const fs::path& file) {
  std::map<std::int64_t, GtFrame> by_frame;
  std::int64_t last = 0;
  for_each_line(file, [&](const LineReader& r, const json& j) {
    const std::int64_t f = r.frame(j, last);
    const std::int64_t id = r.int64(j, "object_id");
    if (id < 0) r.fail("negative object_id");
    Detection probe;
    probe.box = r.box(j);
    try {
      probe = validate_detection(probe);
    } catch (const InvalidBox& e) {
      r.fail(e.what());
    }
    GtFrame& g = by_frame[f];
    g.frame = f;
    g.objects.push_back(LabeledBox{static_cast<ObjectId>(id), probe.box});
  });
  return dense_frames(std::move(by_frame));
}

void write_gt(const fs::path& file, const std::vector<GtFrame>& gt) {
  auto out = open_out(file);
  for (const auto& g : gt) {
    for (const auto& o : g.objects) {
      ordered_json j;
      j["frame"] = g.frame;
      j["object_id"] = o.object_id;
      add_box(j, o.box);
      out << j.dump() << '\n';
    }
  }
}

std::vector<FrameOutput> read_tracks(const fs::path& file) {
  std::map<std::int64_t, FrameOutput> by_frame;
  std::int64_t last = 0;
  for_each_line(file, [&](const LineReader& r, const json& j) {
    const std::int64_t f = r.frame(j, last);
    const std::int64_t id = r.int64(j, "track_id");
    if (id < 0) r.fail("negative track_id");
    Detection probe;
    probe.box = r.box(j);
    probe.score = r.num(j, "score");
    try {
      probe = validate_detection(probe);
    } catch (const InvalidBox& e) {
      r.fail(e.what());
    }
    FrameOutput& out = by_frame[f];
    out.frame = f;
    out.boxes.push_back(EmittedBox{static_cast<TrackId>(id), probe.box, probe.score});
  });
  return dense_frames(std::move(by_frame));
}

void write_tracks(const fs::path& file, const std::vector<FrameOutput>& outputs) {
  auto out = open_out(file);
  for (const auto& o : outputs) {
    for (const auto& b : o.boxes) {
      ordered_json j;
      j["frame"] = o.frame;
      j["track_id"] = b.track_id;
      add_box(j, b.box);
      j["score"] = b.score;
      out << j.dump() << '\n';
    }
  }
}

}  // namespace comot
