#include "comot/metrics.hpp"

#include "comot/assign.hpp"
#include "comot/error.hpp"
#include "comot/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

namespace comot {
namespace {

/// One frame with its full GT x prediction IoU matrix precomputed.
struct CachedFrame {
  std::int64_t frame = 0;
  const std::vector<LabeledBox>* gt = nullptr;
  const std::vector<EmittedBox>* pred = nullptr;
  Eigen::MatrixXd iou;
};

const std::vector<LabeledBox> kNoGt;
const std::vector<EmittedBox> kNoPred;

std::vector<CachedFrame> cache_frames(std::span<const GtFrame> gt, std::span<const FrameOutput> pred) {
  std::map<std::int64_t, CachedFrame> by_frame;
  for (const auto& f : gt) {
    auto& c = by_frame[f.frame];
    c.frame = f.frame;
    c.gt = &f.objects;
  }
  for (const auto& f : pred) {
    auto& c = by_frame[f.frame];
    c.frame = f.frame;
    c.pred = &f.boxes;
  }
  std::vector<CachedFrame> frames;
  frames.reserve(by_frame.size());
  for (auto& [idx, c] : by_frame) {
    if (!c.gt) c.gt = &kNoGt;
    if (!c.pred) c.pred = &kNoPred;
    std::vector<Box> rows, cols;
    for (const auto& g : *c.gt) rows.push_back(g.box);
    for (const auto& p : *c.pred) cols.push_back(p.box);
    c.iou = iou_matrix(rows, cols);
    frames.push_back(std::move(c));
  }
  return frames;
}

FrameMatch match_cached(const std::vector<LabeledBox>& gt, const std::vector<EmittedBox>& pred,
                        const Eigen::MatrixXd& iou, std::span<const std::size_t> cols,
                        MatchMemory& memory, double iou_threshold) {
  Eigen::MatrixXd sub(iou.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    sub.col(static_cast<Eigen::Index>(c)) = iou.col(static_cast<Eigen::Index>(cols[c]));
  }
  const AssociationResult assoc = associate_iou(sub, iou_threshold);

  FrameMatch m;
  m.counts.gt_count = static_cast<std::int64_t>(gt.size());
  m.counts.tp = static_cast<std::int64_t>(assoc.matched_pairs.size());
  m.counts.fn = m.counts.gt_count - m.counts.tp;
  m.counts.fp = static_cast<std::int64_t>(cols.size()) - m.counts.tp;
  for (const auto& [r, c] : assoc.matched_pairs) {
    const double overlap = sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    const ObjectId oid = gt[r].object_id;
    const TrackId tid = pred[cols[c]].track_id;
    auto it = memory.find(oid);
    if (it != memory.end() && it->second != tid) ++m.counts.idsw;
    memory[oid] = tid;
    m.counts.matched_iou_sum += overlap;
    m.pairs.push_back(FrameMatch::Pair{oid, tid, overlap});
  }
  return m;
}

SequenceEvaluation evaluate_cached(const std::vector<CachedFrame>& frames, double min_score,
                                   double iou_threshold) {
  SequenceEvaluation eval;
  MatchMemory memory;
  std::vector<std::size_t> cols;
  for (const auto& f : frames) {
    cols.clear();
    for (std::size_t c = 0; c < f.pred->size(); ++c) {
      if ((*f.pred)[c].score >= min_score) cols.push_back(c);
    }
    FrameMatch m = match_cached(*f.gt, *f.pred, f.iou, cols, memory, iou_threshold);
    eval.totals += m.counts;
    eval.frames.push_back(f.frame);
    eval.per_frame.push_back(m.counts);
    eval.matches.push_back(std::move(m.pairs));
  }
  return eval;
}

std::int64_t errors_of(const FrameCounts& c) { return c.fp + c.fn + c.idsw; }

}  // namespace

FrameCounts& FrameCounts::operator+=(const FrameCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  idsw += o.idsw;
  matched_iou_sum += o.matched_iou_sum;
  gt_count += o.gt_count;
  return *this;
}

FrameMatch match_frame(std::span<const LabeledBox> gt, std::span<const EmittedBox> pred,
                       MatchMemory& memory, double iou_threshold) {
  const std::vector<LabeledBox> g(gt.begin(), gt.end());
  const std::vector<EmittedBox> p(pred.begin(), pred.end());
  std::vector<Box> rows, cols;
  for (const auto& x : g) rows.push_back(x.box);
  for (const auto& x : p) cols.push_back(x.box);
  std::vector<std::size_t> all(p.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return match_cached(g, p, iou_matrix(rows, cols), all, memory, iou_threshold);
}

SequenceEvaluation evaluate_sequence(std::span<const GtFrame> gt, std::span<const FrameOutput> pred,
                                     double min_score, double iou_threshold) {
  return evaluate_cached(cache_frames(gt, pred), min_score, iou_threshold);
}

MotaMotp mota_motp(const FrameCounts& totals) {
  if (totals.gt_count <= 0) throw NoGroundTruth("sequence has no ground-truth objects");
  MotaMotp out;
  out.mota = 1.0 - static_cast<double>(errors_of(totals)) / static_cast<double>(totals.gt_count);
  out.motp = totals.tp > 0 ? totals.matched_iou_sum / static_cast<double>(totals.tp) : 0.0;
  return out;
}

double mostly_tracked(std::span<const GtFrame> gt, const SequenceEvaluation& eval) {
  std::map<ObjectId, std::int64_t> lifetime, covered;
  for (const auto& f : gt) {
    for (const auto& o : f.objects) ++lifetime[o.object_id];
  }
  if (lifetime.empty()) return 0.0;
  for (const auto& frame_pairs : eval.matches) {
    for (const auto& p : frame_pairs) ++covered[p.object_id];
  }
  std::int64_t mostly = 0;
  for (const auto& [id, life] : lifetime) {
    // Inclusive bound, compared in integers: covered / life >= 4/5.
    if (5 * covered[id] >= 4 * life) ++mostly;
  }
  return static_cast<double>(mostly) / static_cast<double>(lifetime.size());
}

MetricsReport amota_family(std::span<const GtFrame> gt, std::span<const FrameOutput> pred,
                           int recall_thresholds, double iou_threshold) {
  const auto frames = cache_frames(gt, pred);

  MetricsReport report;
  const SequenceEvaluation all = evaluate_cached(frames, -1.0, iou_threshold);
  if (all.totals.gt_count <= 0) throw NoGroundTruth("sequence has no ground-truth objects");
  const std::int64_t gt_total = all.totals.gt_count;
  const MotaMotp overall = mota_motp(all.totals);
  report.totals = all.totals;
  report.mota = 100.0 * std::clamp(overall.mota, 0.0, 1.0);
  report.motp = 100.0 * overall.motp;

  std::set<ObjectId> objects;
  for (const auto& f : gt) {
    for (const auto& o : f.objects) objects.insert(o.object_id);
  }
  report.gt_objects = static_cast<std::int64_t>(objects.size());
  const double mt = mostly_tracked(gt, all);
  report.mt = 100.0 * mt;
  report.mostly_tracked_objects =
      static_cast<std::int64_t>(std::llround(mt * static_cast<double>(objects.size())));

  std::set<double, std::greater<>> thresholds;
  for (const auto& f : pred) {
    for (const auto& b : f.boxes) thresholds.insert(b.score);
  }
  // Descending thresholds keep the fewest predictions first.
  std::vector<std::pair<double, FrameCounts>> sweep;
  sweep.reserve(thresholds.size());
  for (double s : thresholds) sweep.emplace_back(s, evaluate_cached(frames, s, iou_threshold).totals);

  const int levels = std::max(1, recall_thresholds);
  double amota = 0.0, amotp = 0.0, samota = 0.0;
  for (int k = 1; k <= levels; ++k) {
    OperatingPoint op;
    op.recall_target = static_cast<double>(k) / levels;
    for (const auto& [s, counts] : sweep) {
      if (counts.tp * levels >= static_cast<std::int64_t>(k) * gt_total) {
        op.reachable = true;
        op.score_threshold = s;
        op.counts = counts;
        break;
      }
    }
    if (op.reachable) {
      const double g = static_cast<double>(gt_total);
      const double r = op.recall_target;
      const double errors = static_cast<double>(errors_of(op.counts));
      op.recall = static_cast<double>(op.counts.tp) / g;
      op.mota = std::max(0.0, 1.0 - errors / g);
      op.motp = op.counts.tp > 0 ? op.counts.matched_iou_sum / static_cast<double>(op.counts.tp) : 0.0;
      op.smota = std::clamp(1.0 - (errors - (1.0 - r) * g) / (r * g), 0.0, 1.0);
    }
    amota += op.mota;
    amotp += op.motp;
    samota += op.smota;
    report.operating_points.push_back(op);
  }
  report.amota = 100.0 * amota / levels;
  report.amotp = 100.0 * amotp / levels;
  report.samota = 100.0 * samota / levels;
  return report;
}

nlohmann::json to_json(const MetricsReport& report) {
  using nlohmann::json;
  json ops = json::array();
  for (const auto& op : report.operating_points) {
    ops.push_back(json{{"recall_target", op.recall_target},
                       {"reachable", op.reachable},
                       {"score_threshold", op.score_threshold},
                       {"recall", op.recall},
                       {"mota", op.mota},
                       {"motp", op.motp},
                       {"smota", op.smota},
                       {"tp", op.counts.tp},
                       {"fp", op.counts.fp},
                       {"fn", op.counts.fn},
                       {"idsw", op.counts.idsw}});
  }
  return json{{"amota", report.amota},
              {"amotp", report.amotp},
              {"samota", report.samota},
              {"mota", report.mota},
              {"motp", report.motp},
              {"mt", report.mt},
              {"tp", report.totals.tp},
              {"fp", report.totals.fp},
              {"fn", report.totals.fn},
              {"idsw", report.totals.idsw},
              {"gt", report.totals.gt_count},
              {"gt_objects", report.gt_objects},
              {"mostly_tracked_objects", report.mostly_tracked_objects},
              {"operating_points", ops}};
}

std::string format_table(std::span<const std::pair<std::string, MetricsReport>> rows) {
  std::size_t width = 6;
  for (const auto& [label, r] : rows) width = std::max(width, label.size());
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-*s | %9s | %9s | %9s | %9s\n", static_cast<int>(width),
                "Method", "AMOTA(%)", "AMOTP(%)", "sAMOTA(%)", "MT(%)");
  os << buf << std::string(width, '-') << "-+-----------+-----------+-----------+----------\n";
  for (const auto& [label, r] : rows) {
    std::snprintf(buf, sizeof buf, "%-*s | %9.2f | %9.2f | %9.2f | %9.2f\n",
                  static_cast<int>(width), label.c_str(), r.amota, r.amotp, r.samota, r.mt);
    os << buf;
  }
  return os.str();
}

std::vector<MotpBin> motp_by_tp_count(const SequenceEvaluation& eval) {
  std::map<std::int64_t, std::pair<double, std::int64_t>> bins;
  for (const auto& c : eval.per_frame) {
    if (c.tp <= 0) continue;
    auto& [sum, n] = bins[c.tp];
    sum += c.matched_iou_sum / static_cast<double>(c.tp);
    ++n;
  }
  std::vector<MotpBin> out;
  for (const auto& [tp, acc] : bins) {
    out.push_back(MotpBin{tp, acc.first / static_cast<double>(acc.second), acc.second});
  }
  return out;
}

}  // namespace comot
