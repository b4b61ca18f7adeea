#include "commands.hpp"

#include "comot/comot.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <charconv>
#include <chrono>
#include <fstream>
#include <ostream>
#include <utility>

namespace comot::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

std::string path_string(const std::optional<fs::path>& p) { return p ? p->string() : std::string(); }

fs::path dir_of(const fs::path& file) {
  return file.has_parent_path() ? file.parent_path() : fs::path(".");
}

void write_text(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(ErrorCode::Io, "cannot write '" + file.string() + "'");
  out << text;
}

json read_json_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(ErrorCode::ConfigParse, "cannot open config '" + file.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(ErrorCode::ConfigParse, file.string() + ": " + e.what());
  }
}

struct Manifest {
  explicit Manifest(std::string cmd) : command(std::move(cmd)) {}

  std::string command;
  json config = json::object();
  json inputs = json::object();
  std::optional<std::uint64_t> seed;
  std::vector<fs::path> outputs;
  Clock::time_point started = Clock::now();

  void write(const fs::path& dir) const {
    json j;
    j["tool"] = "comot";
    j["version"] = COMOT_VERSION;
    j["command"] = command;
    j["config"] = config;
    j["inputs"] = inputs;
    j["seed"] = seed ? json(*seed) : json(nullptr);
    j["outputs"] = json::array();
    for (const auto& p : outputs) j["outputs"].push_back(p.string());
    j["duration_s"] = std::chrono::duration<double>(Clock::now() - started).count();
    write_text(dir / kManifestName, j.dump(2) + "\n");
  }
};

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Maps library exceptions to exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

void require_exists(const fs::path& p, const char* what) {
  if (!fs::exists(p)) throw DataError(ErrorCode::Io, std::string(what) + " not found: '" + p.string() + "'");
}

}  // namespace

int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Manifest m("simulate");
    ScenarioConfig cfg = opt.config ? parse_scenario(read_json_file(*opt.config))
                                    : ScenarioConfig::two_agent_default();
    if (opt.seed) cfg.seed = *opt.seed;
    cfg.validate();
    const Scenario s = generate(cfg);

    const fs::path gt = opt.out / "gt.jsonl";
    const fs::path dets = opt.out / "detections";
    write_gt(gt, s.gt);
    write_detections_dir(dets, s.bundles);

    m.config = to_json(cfg);
    m.inputs["config"] = path_string(opt.config);
    m.seed = cfg.seed;
    m.outputs = {gt, dets};
    m.write(opt.out);
    out << "wrote " << s.gt.size() << " frames to " << opt.out.string() << '\n';
    return kOk;
  });
}

int cmd_track(const TrackOptions& opt, std::ostream& out, std::ostream& err) {
  const auto method = parse_method(opt.method);
  if (!method) {
    err << "error: unknown method '" << opt.method << "' (expected baseline, aos or tsa)\n";
    return kUsageError;
  }
  return guarded(err, [&] {
    Manifest m("track");
    TrackerConfig cfg = opt.config ? load_config(*opt.config) : TrackerConfig{};
    cfg.method = *method;
    cfg.validate();

    require_exists(opt.detections, "detections");
    if (opt.poses) require_exists(*opt.poses, "poses");
    const auto bundles = read_detections(opt.detections, opt.poses);
    const auto outputs = run_sequence(bundles, cfg, KalmanModel::from_params(cfg.kalman));
    write_tracks(opt.out, outputs);

    m.config = to_json(cfg);
    m.inputs = {{"detections", opt.detections.string()},
                {"poses", path_string(opt.poses)},
                {"config", path_string(opt.config)}};
    m.outputs = {opt.out};
    m.write(dir_of(opt.out));
    out << "tracked " << bundles.size() << " frames with " << to_string(cfg.method) << '\n';
    return kOk;
  });
}

int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Manifest m("eval");
    require_exists(opt.tracks, "tracks");
    require_exists(opt.gt, "ground truth");
    const auto gt = read_gt(opt.gt);
    const auto tracks = read_tracks(opt.tracks);
    const MetricsReport report = amota_family(gt, tracks);
    write_text(opt.out, to_json(report).dump(2) + "\n");
    if (opt.table) {
      const std::pair<std::string, MetricsReport> rows[] = {{opt.tracks.stem().string(), report}};
      out << format_table(rows);
    }

    m.config = {{"iou_threshold", kMetricIouThreshold}, {"recall_thresholds", kRecallThresholds}};
    m.inputs = {{"tracks", opt.tracks.string()}, {"gt", opt.gt.string()}};
    m.outputs = {opt.out};
    m.write(dir_of(opt.out));
    return kOk;
  });
}

int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Manifest m("analyze");
    require_exists(opt.tracks, "tracks");
    require_exists(opt.gt, "ground truth");
    const auto gt = read_gt(opt.gt);
    const auto tracks = read_tracks(opt.tracks);
    const SequenceEvaluation eval = evaluate_sequence(gt, tracks);
    if (eval.totals.gt_count == 0) throw NoGroundTruth("ground truth has no objects");

    std::string csv = "tp_count,mean_motp,frequency\n";
    for (const auto& bin : motp_by_tp_count(eval)) {
      csv += std::to_string(bin.tp_count) + "," + shortest(bin.mean_motp) + "," +
             std::to_string(bin.frequency) + "\n";
    }
    write_text(opt.out, csv);

    m.config = {{"iou_threshold", kMetricIouThreshold}};
    m.inputs = {{"tracks", opt.tracks.string()}, {"gt", opt.gt.string()}};
    m.outputs = {opt.out};
    m.write(dir_of(opt.out));
    out << "wrote " << opt.out.string() << '\n';
    return kOk;
  });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cooperative multi-object tracking with graph-Laplacian refinement", "comot"};
  app.require_subcommand(1);
  app.set_version_flag("--version", COMOT_VERSION);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic multi-agent scenario");
  simulate->add_option("--config", sim.config, "Scenario JSON");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--seed", sim.seed, "Override the scenario seed");

  TrackOptions trk;
  auto* track = app.add_subcommand("track", "Run a tracking pipeline over detections");
  track->add_option("--method", trk.method, "baseline, aos or tsa")->required();
  track->add_option("--detections", trk.detections, "Detection file or directory")->required();
  track->add_option("--out", trk.out, "Tracks file")->required();
  track->add_option("--poses", trk.poses, "Pose file or directory; detections are then agent-local");
  track->add_option("--config", trk.config, "Tracker config JSON");

  EvalOptions ev;
  auto* evaluate = app.add_subcommand("eval", "Compute AMOTA, AMOTP, sAMOTA, MT, MOTA and MOTP");
  evaluate->add_option("--tracks", ev.tracks, "Tracks file")->required();
  evaluate->add_option("--gt", ev.gt, "Ground-truth file")->required();
  evaluate->add_option("--out", ev.out, "Report JSON")->required();
  evaluate->add_flag("--table", ev.table, "Print a text table");

  AnalyzeOptions an;
  auto* analyze = app.add_subcommand("analyze", "Per-frame MOTP binned by true-positive count");
  analyze->add_option("--tracks", an.tracks, "Tracks file")->required();
  analyze->add_option("--gt", an.gt, "Ground-truth file")->required();
  analyze->add_option("--out", an.out, "CSV output")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == static_cast<int>(CLI::ExitCodes::Success) ? kOk : kUsageError;
  }

  if (*simulate) return cmd_simulate(sim, out, err);
  if (*track) return cmd_track(trk, out, err);
  if (*evaluate) return cmd_eval(ev, out, err);
  return cmd_analyze(an, out, err);
}

}  // namespace comot::cli
