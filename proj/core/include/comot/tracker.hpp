#pragma once

#include "comot/config.hpp"
#include "comot/kalman.hpp"
#include "comot/types.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace comot {

/// Live tracks between frames. States are already predicted to the next frame.
struct TrackSet {
  std::vector<TrackState> tracks;
  TrackId next_id = 1;
  std::int64_t frames_processed = 0;
};

struct EmittedBox {
  TrackId track_id = 0;
  Box box;
  double score = 0.0;

  friend bool operator==(const EmittedBox&, const EmittedBox&) = default;
};

struct FrameOutput {
  std::int64_t frame = 0;
  std::vector<EmittedBox> boxes;

  friend bool operator==(const FrameOutput&, const FrameOutput&) = default;
};

/// Per-frame bookkeeping, mostly for tests and diagnostics.
struct StepStats {
  std::size_t candidates = 0;
  std::size_t stage_matches[2] = {0, 0};  // first stage, all later stages
  std::size_t births = 0;
  std::size_t deaths = 0;
};

struct StepResult {
  TrackSet tracks;
  FrameOutput output;
  StepStats stats;
};

/// Applies the hit/miss rules after association. Tracks listed in
/// `matched` gain a hit and clear their misses (Confirmed once hits reach
/// min_hits); every other track loses its hit streak, gains a miss and dies
/// after max_age consecutive misses. Dead tracks are dropped.
std::vector<TrackState> manage_lifecycle(std::vector<TrackState> tracks,
                                         std::span<const std::size_t> matched,
                                         const TrackerConfig& cfg);

/// Raw detections of all agents, single association stage.
StepResult step_baseline(const TrackSet& tracks, const FrameBundle& bundle,
                         const TrackerConfig& cfg, const KalmanModel& model);

/// Refined detections with all-in-one-stage anchors, single association stage.
StepResult step_aos(const TrackSet& tracks, const FrameBundle& bundle, const TrackerConfig& cfg,
                    const KalmanModel& model);

/// Two refined sets; the second only sees tracks and nodes left unmatched by the first.
StepResult step_tsa(const TrackSet& tracks, const FrameBundle& bundle, const TrackerConfig& cfg,
                    const KalmanModel& model);

/// Dispatches on cfg.method.
StepResult step(const TrackSet& tracks, const FrameBundle& bundle, const TrackerConfig& cfg,
                const KalmanModel& model);

std::vector<FrameOutput> run_sequence(std::span<const FrameBundle> frames,
                                      const TrackerConfig& cfg, const KalmanModel& model);

}  // namespace comot
