#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace comot::cli {

/// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kDataError = 1;
inline constexpr int kUsageError = 2;

inline constexpr const char* kManifestName = "run_manifest.json";

struct SimulateOptions {
  std::optional<std::filesystem::path> config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
};

struct TrackOptions {
  std::string method = "tsa";
  std::filesystem::path detections;
  std::filesystem::path out;
  std::optional<std::filesystem::path> poses;
  std::optional<std::filesystem::path> config;
};

struct EvalOptions {
  std::filesystem::path tracks;
  std::filesystem::path gt;
  std::filesystem::path out;
  bool table = false;
};

struct AnalyzeOptions {
  std::filesystem::path tracks;
  std::filesystem::path gt;
  std::filesystem::path out;
};

/// Commands report failures on `err` and return an exit code.

/// Writes <out>/gt.jsonl and <out>/detections/<agent>.jsonl.
int cmd_simulate(const SimulateOptions& opt, std::ostream& out, std::ostream& err);
/// Writes the tracks file.
int cmd_track(const TrackOptions& opt, std::ostream& out, std::ostream& err);
/// Writes the metrics report as JSON; with `table` also prints a text table to `out`.
int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err);
/// Writes tp_count,mean_motp,frequency rows.
int cmd_analyze(const AnalyzeOptions& opt, std::ostream& out, std::ostream& err);

/// Parses `args` (without the program name) and dispatches. Every command also
/// writes run_manifest.json next to its outputs.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace comot::cli
