#pragma once

#include "comot/tracker.hpp"
#include "comot/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace comot {

using ObjectId = std::uint64_t;

struct LabeledBox {
  ObjectId object_id = 0;
  Box box;

  friend bool operator==(const LabeledBox&, const LabeledBox&) = default;
};

struct GtFrame {
  std::int64_t frame = 0;
  std::vector<LabeledBox> objects;

  friend bool operator==(const GtFrame&, const GtFrame&) = default;
};

inline constexpr double kMetricIouThreshold = 0.25;
inline constexpr int kRecallThresholds = 40;
inline constexpr double kMostlyTrackedRatio = 0.8;

struct FrameCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t idsw = 0;
  double matched_iou_sum = 0.0;
  std::int64_t gt_count = 0;

  FrameCounts& operator+=(const FrameCounts& o);
};

struct FrameMatch {
  FrameCounts counts;
  struct Pair {
    ObjectId object_id;
    TrackId track_id;
    double iou;
  };
  std::vector<Pair> pairs;
};

/// Last track id matched to each GT object, carried across frames.
using MatchMemory = std::map<ObjectId, TrackId>;

/// Gated max-overlap matching of one frame. An identity switch is counted
/// when a GT object is matched to a track id other than the one it was last
/// matched to. `memory` is updated in place.
FrameMatch match_frame(std::span<const LabeledBox> gt, std::span<const EmittedBox> pred,
                       MatchMemory& memory, double iou_threshold = kMetricIouThreshold);

struct SequenceEvaluation {
  FrameCounts totals;
  std::vector<std::int64_t> frames;  // frame index per entry below
  std::vector<FrameCounts> per_frame;
  std::vector<std::vector<FrameMatch::Pair>> matches;
};

/// CLEAR evaluation over a sequence, ignoring predictions scored below `min_score`.
/// Frames are aligned by index; frames absent on one side count as empty.
SequenceEvaluation evaluate_sequence(std::span<const GtFrame> gt, std::span<const FrameOutput> pred,
                                     double min_score = -1.0,
                                     double iou_threshold = kMetricIouThreshold);

struct MotaMotp {
  double mota = 0.0;
  double motp = 0.0;  // 0 when there are no true positives
};

/// MOTA = 1 - (FP + FN + IDSW) / GT, MOTP = mean matched IoU. Throws NoGroundTruth.
MotaMotp mota_motp(const FrameCounts& totals);

/// Share of GT objects matched in at least 80% of the frames they appear in.
double mostly_tracked(std::span<const GtFrame> gt, const SequenceEvaluation& eval);

struct OperatingPoint {
  double recall_target = 0.0;
  bool reachable = false;
  double score_threshold = 0.0;
  double recall = 0.0;
  double mota = 0.0;
  double motp = 0.0;
  double smota = 0.0;
  FrameCounts counts;
};

/// Headline metrics are percentages in [0, 100].
struct MetricsReport {
  double amota = 0.0;
  double amotp = 0.0;
  double samota = 0.0;
  double mota = 0.0;
  double motp = 0.0;
  double mt = 0.0;
  FrameCounts totals;
  std::int64_t gt_objects = 0;
  std::int64_t mostly_tracked_objects = 0;
  std::vector<OperatingPoint> operating_points;
};

/// Recall-sweep metrics. For each recall target r = k/L the highest score
/// threshold whose filtered predictions reach recall >= r is evaluated;
/// unreachable targets contribute zero. MOTA_r is clamped at 0 and
/// sMOTA_r = clamp(1 - (FP + FN + IDSW - (1 - r) GT) / (r GT), 0, 1).
MetricsReport amota_family(std::span<const GtFrame> gt, std::span<const FrameOutput> pred,
                           int recall_thresholds = kRecallThresholds,
                           double iou_threshold = kMetricIouThreshold);

nlohmann::json to_json(const MetricsReport& report);

/// Aligned text table: one row per (label, report) with AMOTA, AMOTP, sAMOTA, MT.
std::string format_table(std::span<const std::pair<std::string, MetricsReport>> rows);

struct MotpBin {
  std::int64_t tp_count = 0;
  double mean_motp = 0.0;
  std::int64_t frequency = 0;
};

/// Frames with at least one true positive binned by their TP count; each bin
/// carries the mean per-frame MOTP and the number of frames.
std::vector<MotpBin> motp_by_tp_count(const SequenceEvaluation& eval);

}  // namespace comot
