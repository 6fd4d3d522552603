#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "vlmprobe/analyze.hpp"
#include "vlmprobe/featurize.hpp"
#include "vlmprobe/lexres.hpp"
#include "vlmprobe/report.hpp"

namespace vlmprobe::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kResourceError = 2 };

struct ResourceOverrides {
  std::optional<std::filesystem::path> data_noun, data_verb, index_noun, index_verb;
  std::optional<std::filesystem::path> liwc, levin, inquirer, concreteness, frequency;
};

struct Config {
  std::filesystem::path scores_path;
  std::filesystem::path resources_dir;
  std::filesystem::path out_dir;
  ResourceOverrides overrides;
  std::vector<analyze::Target> targets = {analyze::Target::p, analyze::Target::n, analyze::Target::d};
  double alpha = 0.05;
  analyze::Correction correction = analyze::Correction::none;
  std::size_t min_support = 10;
  featurize::FrequencyTransform frequency_transform = featurize::FrequencyTransform::log10p1;
  report::Format format = report::Format::csv;
  bool emit_matrix = false;
  bool emit_plots = false;
  unsigned jobs = 1;

  /// resources_dir conventions with per-file overrides applied.
  lexres::ResourcePaths resource_paths() const;
};

/// Full pipeline; writes findings, accuracy.json, manifest.json and optional
/// matrix/plots under out_dir. Returns 0, 1 (bad config or scores file) or 2
/// (missing or malformed resource). Files written before a failure are
/// removed.
int cmd_analyze(const Config& config, std::ostream& log);

/// Checks an interchange file and reports every violation with its line.
int cmd_validate(const std::filesystem::path& scores_path, std::ostream& out);

/// Writes the standardized feature matrix as CSV to `out_path` ("-" = stdout).
int cmd_dump_features(const Config& config, const std::filesystem::path& out_path, std::ostream& log);

/// argv front end used by the vlm-probe executable.
int run(int argc, char** argv);

}  // namespace vlmprobe::cli
