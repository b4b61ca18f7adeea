#pragma once

#include "comot/metrics.hpp"
#include "comot/tracker.hpp"
#include "comot/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace comot {

/// Agent pose in the global frame.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;

  Pose inverse() const;

  friend bool operator==(const Pose&, const Pose&) = default;
};

/// Rotates the centroid by the pose yaw, translates it, and adds the yaw to the heading.
Detection to_global(const Detection& d, const Pose& pose);

using PoseKey = std::pair<std::int64_t, std::string>;  // (frame, agent)
using PoseTable = std::map<PoseKey, Pose>;

// Line-delimited JSON, one object per line:
//   detections {"frame","agent","x","y","z","theta","h","w","l","score"}
//   poses      {"frame","agent","x","y","z","yaw"}
//   gt         {"frame","object_id","x","y","z","theta","h","w","l"}
//   tracks     {"frame","track_id","x","y","z","theta","h","w","l","score"}
// Readers return frames 0..max in ascending order with gaps as empty frames
// and raise DataError(ParseError) naming the offending line, or
// DataError(FrameOrderError) when a file's frame indices decrease.

/// `path` is a .jsonl file or a directory whose *.jsonl files are read in name
/// order. Agents keep the order in which they first appear. With `poses`,
/// detections are agent-local and get projected to the global frame.
std::vector<FrameBundle> read_detections(const std::filesystem::path& path,
                                         const std::optional<std::filesystem::path>& poses = {});

void write_detections(const std::filesystem::path& file, const std::vector<FrameBundle>& bundles);
/// One <agent>.jsonl per agent inside `dir` (created if needed).
void write_detections_dir(const std::filesystem::path& dir, const std::vector<FrameBundle>& bundles);

PoseTable read_poses(const std::filesystem::path& path);
void write_poses(const std::filesystem::path& file, const PoseTable& poses);

std::vector<GtFrame> read_gt(const std::filesystem::path& file);
void write_gt(const std::filesystem::path& file, const std::vector<GtFrame>& gt);

std::vector<FrameOutput> read_tracks(const std::filesystem::path& file);
void write_tracks(const std::filesystem::path& file, const std::vector<FrameOutput>& outputs);

}  // namespace comot
