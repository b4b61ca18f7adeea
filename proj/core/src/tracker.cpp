#include "comot/tracker.hpp"

#include "comot/assign.hpp"
#include "comot/graph_laplacian.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace comot {
namespace {

std::vector<AgentDetections> validated(const FrameBundle& bundle) {
  std::vector<AgentDetections> agents;
  agents.reserve(bundle.agents.size());
  for (const auto& a : bundle.agents) {
    AgentDetections out{a.agent_id, {}};
    out.detections.reserve(a.detections.size());
    for (const auto& d : a.detections) out.detections.push_back(validate_detection(d));
    agents.push_back(std::move(out));
  }
  return agents;
}

std::vector<Detection> concatenated(const std::vector<AgentDetections>& agents) {
  std::vector<Detection> all;
  for (const auto& a : agents) all.insert(all.end(), a.detections.begin(), a.detections.end());
  return all;
}

bool has_detections(const std::vector<AgentDetections>& agents) {
  return std::any_of(agents.begin(), agents.end(),
                     [](const AgentDetections& a) { return !a.detections.empty(); });
}

std::vector<Detection> candidates_of(const RefinedDetectionSet& set, const TrackerConfig& cfg) {
  if (!cfg.dedup_matched_pairs) return set.boxes;
  return merge_matched_groups(set, nullptr);
}

/// Cross-agent match group of every candidate. Empty when matched groups are
/// merged, since each merged candidate then stands for its whole group.
std::vector<std::optional<std::size_t>> groups_of(const RefinedDetectionSet& set,
                                                  const TrackerConfig& cfg) {
  std::vector<std::optional<std::size_t>> groups;
  if (cfg.dedup_matched_pairs) return groups;
  groups.reserve(set.map.size());
  for (const auto& node : set.map.nodes) groups.push_back(node.group);
  return groups;
}

/// Association stages over a fixed candidate indexing. stages[s][k] is the
/// version of candidate k used in stage s; stage s only sees tracks and
/// candidates left unmatched by the earlier stages. Candidates unmatched in
/// every stage are born from their first-stage version, at most one per
/// cross-agent match group and none for a group that already updated a track.
StepResult run_stages(const TrackSet& in, std::int64_t frame,
                      const std::vector<std::vector<Detection>>& stages,
                      const std::vector<std::optional<std::size_t>>& groups,
                      const TrackerConfig& cfg, const KalmanModel& model) {
  StepResult result;
  std::vector<TrackState> tracks = in.tracks;
  std::vector<std::size_t> track_pool(tracks.size());
  for (std::size_t i = 0; i < tracks.size(); ++i) track_pool[i] = i;
  const std::size_t count = stages.empty() ? 0 : stages.front().size();
  std::vector<std::size_t> cand_pool(count);
  for (std::size_t k = 0; k < count; ++k) cand_pool[k] = k;
  result.stats.candidates = count;

  std::vector<std::size_t> matched;
  std::set<std::size_t> claimed_groups;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    if (track_pool.empty() || cand_pool.empty()) break;
    std::vector<Box> rows, cols;
    rows.reserve(track_pool.size());
    cols.reserve(cand_pool.size());
    for (std::size_t t : track_pool) rows.push_back(tracks[t].box());
    for (std::size_t k : cand_pool) cols.push_back(stages[s][k].box);
    const AssociationResult assoc =
        associate(std::span<const Box>(rows), std::span<const Box>(cols), cfg.iou_assoc_threshold);

    for (const auto& [r, c] : assoc.matched_pairs) {
      const std::size_t t = track_pool[r];
      const Detection& det = stages[s][cand_pool[c]];
      tracks[t] = correct(tracks[t], det.box.as_vector(), model);
      tracks[t].score = det.score;
      matched.push_back(t);
      if (!groups.empty() && groups[cand_pool[c]]) claimed_groups.insert(*groups[cand_pool[c]]);
    }
    result.stats.stage_matches[s == 0 ? 0 : 1] += assoc.matched_pairs.size();

    std::vector<std::size_t> next_tracks, next_cands;
    for (std::size_t r : assoc.unmatched_rows) next_tracks.push_back(track_pool[r]);
    for (std::size_t c : assoc.unmatched_cols) next_cands.push_back(cand_pool[c]);
    track_pool = std::move(next_tracks);
    cand_pool = std::move(next_cands);
  }

  std::sort(matched.begin(), matched.end());
  const std::size_t before = tracks.size();
  // manage_lifecycle works on indices, so survivors keep their relative order.
  tracks = manage_lifecycle(std::move(tracks), matched, cfg);
  result.stats.deaths = before - tracks.size();

  TrackId next_id = in.next_id;
  std::sort(cand_pool.begin(), cand_pool.end());
  for (std::size_t k : cand_pool) {
    if (!groups.empty() && groups[k] && !claimed_groups.insert(*groups[k]).second) continue;
    TrackState born = init_track(stages.front()[k], next_id++, model);
    if (born.hits >= cfg.min_hits) born.status = TrackStatus::Confirmed;
    tracks.push_back(std::move(born));
    ++result.stats.births;
  }

  const bool warm = cfg.warm_start && in.frames_processed < cfg.min_hits - 1;
  result.output.frame = frame;
  for (const auto& t : tracks) {
    if (t.misses != 0) continue;
    if (t.status == TrackStatus::Confirmed || warm) {
      result.output.boxes.push_back(EmittedBox{t.track_id, t.box(), t.score});
    }
  }

  result.tracks.next_id = next_id;
  result.tracks.frames_processed = in.frames_processed + 1;
  result.tracks.tracks.reserve(tracks.size());
  for (const auto& t : tracks) result.tracks.tracks.push_back(predict(t, model));
  return result;
}

}  // namespace

std::vector<TrackState> manage_lifecycle(std::vector<TrackState> tracks,
                                         std::span<const std::size_t> matched,
                                         const TrackerConfig& cfg) {
  std::vector<bool> is_matched(tracks.size(), false);
  for (std::size_t i : matched) is_matched.at(i) = true;
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    TrackState& t = tracks[i];
    if (t.status == TrackStatus::Dead) continue;
    if (is_matched[i]) {
      t.hits += 1;
      t.misses = 0;
      t.status = t.hits >= cfg.min_hits ? TrackStatus::Confirmed : TrackStatus::Tentative;
    } else {
      t.hits = 0;
      t.misses += 1;
      t.status = t.misses >= cfg.max_age ? TrackStatus::Dead : TrackStatus::Tentative;
    }
  }
  std::erase_if(tracks, [](const TrackState& t) { return t.status == TrackStatus::Dead; });
  return tracks;
}

StepResult step_baseline(const TrackSet& tracks, const FrameBundle& bundle,
                         const TrackerConfig& cfg, const KalmanModel& model) {
  const auto agents = validated(bundle);
  return run_stages(tracks, bundle.frame, {concatenated(agents)}, {}, cfg, model);
}

StepResult step_aos(const TrackSet& tracks, const FrameBundle& bundle, const TrackerConfig& cfg,
                    const KalmanModel& model) {
  const auto agents = validated(bundle);
  std::vector<std::vector<Detection>> stages;
  std::vector<std::optional<std::size_t>> groups;
  if (has_detections(agents)) {
    const auto sets = refine(agents, RefineScheme::AOS, cfg.cross_agent_iou_threshold);
    stages.push_back(candidates_of(sets.front(), cfg));
    groups = groups_of(sets.front(), cfg);
  }
  return run_stages(tracks, bundle.frame, stages, groups, cfg, model);
}

StepResult step_tsa(const TrackSet& tracks, const FrameBundle& bundle, const TrackerConfig& cfg,
                    const KalmanModel& model) {
  const auto agents = validated(bundle);
  std::vector<std::vector<Detection>> stages;
  std::vector<std::optional<std::size_t>> groups;
  if (has_detections(agents)) {
    const auto sets = refine(agents, RefineScheme::TSA, cfg.cross_agent_iou_threshold);
    for (const auto& set : sets) stages.push_back(candidates_of(set, cfg));
    groups = groups_of(sets.front(), cfg);
  }
  return run_stages(tracks, bundle.frame, stages, groups, cfg, model);
}

StepResult step(const TrackSet& tracks, const FrameBundle& bundle, const TrackerConfig& cfg,
                const KalmanModel& model) {
  switch (cfg.method) {
    case Method::Baseline: return step_baseline(tracks, bundle, cfg, model);
    case Method::AOS: return step_aos(tracks, bundle, cfg, model);
    case Method::TSA: return step_tsa(tracks, bundle, cfg, model);
  }
  return step_tsa(tracks, bundle, cfg, model);
}

std::vector<FrameOutput> run_sequence(std::span<const FrameBundle> frames,
                                      const TrackerConfig& cfg, const KalmanModel& model) {
  std::vector<FrameOutput> outputs;
  outputs.reserve(frames.size());
  TrackSet tracks;
  for (const auto& bundle : frames) {
    StepResult r = step(tracks, bundle, cfg, model);
    tracks = std::move(r.tracks);
    outputs.push_back(std::move(r.output));
  }
  return outputs;
}

}  // namespace comot
