#include "commands.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "vlmprobe/error.hpp"
#include "vlmprobe/ingest.hpp"
#include "vlmprobe/parallel.hpp"

namespace vlmprobe::cli {
namespace fs = std::filesystem;

namespace {

/// Bad flags or an unusable scores file (exit 1).
class UserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Files written by one command; removed again unless commit() is called.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;

  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (auto it = created_.rbegin(); it != created_.rend(); ++it) fs::remove(*it, ec);
  }

  void ensure_dir(const fs::path& rel) {
    const fs::path full = dir_ / rel;
    if (fs::exists(full)) return;
    // Record each directory level we create so a rollback can remove it.
    std::vector<fs::path> missing;
    for (fs::path p = full; !p.empty() && !fs::exists(p); p = p.parent_path()) missing.push_back(p);
    std::error_code ec;
    fs::create_directories(full, ec);
    if (ec) throw IoError("cannot create directory '" + full.string() + "': " + ec.message());
    created_.insert(created_.end(), missing.rbegin(), missing.rend());
  }

  template <typename Write>
  void write(const fs::path& rel, Write&& write_body) {
    const fs::path full = dir_ / rel;
    ensure_dir(rel.parent_path());
    std::ofstream out(full, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot create '" + full.string() + "'");
    created_.push_back(full);
    write_body(out);
    out.close();
    if (!out) throw IoError("failed writing '" + full.string() + "'");
  }

  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> created_;
  bool committed_ = false;
};

void check_config(const Config& config) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw UserError("--alpha must lie in (0, 1)");
  if (config.min_support < 1) throw UserError("--min-support must be at least 1");
  if (config.targets.empty()) throw UserError("--targets must name at least one of p, n, d");
  if (config.jobs < 1) throw UserError("--jobs must be at least 1");
  if (config.scores_path.empty()) throw UserError("no scores file given (--scores-path)");
  std::error_code ec;
  if (!fs::is_regular_file(config.scores_path, ec)) {
    throw UserError("cannot open scores file '" + config.scores_path.string() + "'");
  }
  for (const auto& [role, path] : config.resource_paths().entries()) {
    if (path.empty()) throw UserError("no resources directory given (--resources-dir or VLM_PROBE_RESOURCES)");
    if (!fs::is_regular_file(path, ec)) throw ResourceNotFound(path.string());
  }
}

std::string iso_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// SOURCE_DATE_EPOCH when set, else the newest input modification time; a
// re-run on unchanged inputs reproduces the manifest byte for byte.
std::string run_timestamp(const Config& config) {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(epoch, &end, 10);
    if (end != epoch && *end == '\0') return iso_utc(static_cast<std::time_t>(v));
  }
  std::time_t newest = 0;
  std::vector<fs::path> inputs{config.scores_path};
  for (const auto& [role, path] : config.resource_paths().entries()) inputs.push_back(path);
  for (const auto& p : inputs) {
    struct stat st {};
    if (::stat(p.c_str(), &st) == 0) newest = std::max(newest, st.st_mtime);
  }
  return iso_utc(newest);
}

struct Prepared {
  lexres::Resources resources;
  ingest::Dataset dataset;
  featurize::FeatureMatrix matrix;
};

Prepared prepare(const Config& config, std::ostream& log) {
  check_config(config);
  Prepared out;
  out.resources = lexres::load_resources(config.resource_paths());

  std::ifstream scores(config.scores_path, std::ios::binary);
  if (!scores) throw UserError("cannot open scores file '" + config.scores_path.string() + "'");
  try {
    out.dataset = ingest::read_scores(scores);
  } catch (const Error& e) {
    throw UserError(config.scores_path.string() + ": " + e.what());
  }
  if (out.dataset.instances.empty()) throw UserError(config.scores_path.string() + ": no instances");
  if (out.dataset.unknown_keys > 0) {
    log << "warning: " << out.dataset.unknown_keys << " unknown keys ignored in " << config.scores_path.string()
        << '\n';
  }

  featurize::FeatureOptions fopts;
  fopts.min_support = config.min_support;
  fopts.frequency_transform = config.frequency_transform;
  fopts.jobs = config.jobs;
  try {
    out.matrix = featurize::build_feature_matrix(out.dataset.instances, out.resources, fopts);
  } catch (const CycleDetected& e) {
    throw ResourceFileError(config.resource_paths().data_noun.parent_path().string(), e.what());
  }
  return out;
}

template <typename Body>
int guarded(std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const UserError& e) {
    log << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const ResourceNotFound& e) {
    log << "error: " << e.what() << '\n';
    return kResourceError;
  } catch (const ResourceFileError& e) {
    log << "error: " << e.what() << '\n';
    return kResourceError;
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kResourceError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kValidationError;
  }
}

char target_letter(analyze::Target t) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(analyze::target_name(t)[0])));
}

std::string file_stem(std::string_view name) {
  std::string out(name);
  std::replace_if(out.begin(), out.end(), [](char c) { return c == ':' || c == '@' || c == '/'; }, '_');
  return out;
}

void emit_plots(const Config& config, const Prepared& prep, OutputSet& outputs, std::vector<std::string>& warnings) {
  const auto& instances = prep.dataset.instances;
  const analyze::TargetScores scores = analyze::target_scores(instances);

  const auto overlap = analyze::overlap_summary(instances, 40);
  outputs.write("plots/score_histogram.csv", [&](std::ostream& o) { report::write_histogram_plot(o, overlap); });

  struct PlotRequest {
    const char* column;
    std::vector<analyze::Target> targets;
  };
  using analyze::Target;
  const std::vector<PlotRequest> requests = {
      {"conc@in_common", {Target::p, Target::n, Target::d}}, {"len:sentence", {Target::p, Target::n, Target::d}},
      {"freq@in_common", {Target::p, Target::n, Target::d}}, {"ambig@in_common", {Target::p, Target::n, Target::d}},
      {"sim:sentence", {Target::n}},                         {"sim:word", {Target::n}}};

  for (const PlotRequest& req : requests) {
    const featurize::FeatureColumn* col = prep.matrix.find(req.column);
    if (!col) continue;
    for (Target t : req.targets) {
      if (std::find(config.targets.begin(), config.targets.end(), t) == config.targets.end()) continue;
      const std::string stem = "plots/regression_" + file_stem(req.column) + "_" + target_letter(t);
      try {
        const auto band = stats::linfit_band(col->raw, scores.of(t), 50);
        outputs.write(stem + ".csv", [&](std::ostream& o) { report::write_regression_plot(o, band); });
        outputs.write(stem + "_points.csv", [&](std::ostream& o) { report::write_points(o, col->raw, scores.of(t)); });
      } catch (const IoError&) {
        throw;
      } catch (const Error& e) {
        warnings.push_back("no regression plot for " + std::string(req.column) + ": " + e.what());
      }
    }
  }

  if (const featurize::FeatureColumn* len = prep.matrix.find("len:sentence")) {
    for (Target t : config.targets) {
      const auto groups = report::box_by_group(len->raw, scores.of(t));
      outputs.write(std::string("plots/box_len_sentence_") + target_letter(t) + ".csv",
                    [&](std::ostream& o) { report::write_box_plot(o, groups); });
    }
  }
}

std::vector<analyze::Target> sorted_targets(std::vector<analyze::Target> targets) {
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  return targets;
}

std::string transform_name(featurize::FrequencyTransform t) {
  return t == featurize::FrequencyTransform::log10p1 ? "log10p1" : "raw";
}

std::string format_name(report::Format f) {
  switch (f) {
    case report::Format::csv: return "csv";
    case report::Format::json: return "json";
    case report::Format::markdown: return "markdown";
  }
  return "csv";
}

}  // namespace

lexres::ResourcePaths Config::resource_paths() const {
  lexres::ResourcePaths p = resources_dir.empty() ? lexres::ResourcePaths{} : lexres::ResourcePaths::in_directory(resources_dir);
  auto apply = [](fs::path& target, const std::optional<fs::path>& override_path) {
    if (override_path) target = *override_path;
  };
  apply(p.data_noun, overrides.data_noun);
  apply(p.data_verb, overrides.data_verb);
  apply(p.index_noun, overrides.index_noun);
  apply(p.index_verb, overrides.index_verb);
  apply(p.liwc, overrides.liwc);
  apply(p.levin, overrides.levin);
  apply(p.inquirer, overrides.inquirer);
  apply(p.concreteness, overrides.concreteness);
  apply(p.frequency, overrides.frequency);
  return p;
}

int cmd_analyze(const Config& config, std::ostream& log) {
  return guarded(log, [&] {
    if (config.out_dir.empty()) throw UserError("no output directory given (--out-dir)");
    Prepared prep = prepare(config, log);
    const auto targets = sorted_targets(config.targets);

    analyze::AnalysisOptions aopts;
    aopts.alpha = config.alpha;
    aopts.correction = config.correction;
    aopts.targets = targets;
    aopts.jobs = config.jobs;
    const analyze::AnalysisResult result =
        analyze::run_correlation(prep.matrix, analyze::target_scores(prep.dataset.instances), aopts);
    const analyze::AccuracyReport accuracy = analyze::accuracy_by_slot(prep.dataset.instances);

    std::vector<std::string> warnings = prep.matrix.warnings;
    warnings.insert(warnings.end(), result.warnings.begin(), result.warnings.end());

    OutputSet outputs(config.out_dir);
    outputs.ensure_dir({});
    report::RunManifest manifest;
    for (analyze::Target t : targets) {
      std::vector<analyze::Finding> subset;
      std::copy_if(result.findings.begin(), result.findings.end(), std::back_inserter(subset),
                   [t](const analyze::Finding& f) { return f.target == t; });
      manifest.findings_per_target[std::string(analyze::target_name(t))] = subset.size();
      const std::string name = std::string("findings_") + target_letter(t) + "." +
                               std::string(report::file_extension(config.format));
      outputs.write(name, [&](std::ostream& o) { report::write_findings(o, subset, config.format); });
    }
    outputs.write("accuracy.json", [&](std::ostream& o) { report::write_accuracy(o, accuracy); });
    if (config.emit_matrix) {
      outputs.write("features.csv", [&](std::ostream& o) { featurize::write_matrix_csv(o, prep.matrix); });
    }
    if (config.emit_plots) emit_plots(config, prep, outputs, warnings);

    manifest.tool_version = VLMPROBE_VERSION;
    manifest.timestamp = run_timestamp(config);
    manifest.alpha = config.alpha;
    manifest.correction = std::string(analyze::correction_name(config.correction));
    manifest.min_support = config.min_support;
    manifest.frequency_transform = transform_name(config.frequency_transform);
    for (analyze::Target t : targets) manifest.targets.emplace_back(1, target_letter(t));
    manifest.format = format_name(config.format);
    manifest.emit_matrix = config.emit_matrix;
    manifest.emit_plots = config.emit_plots;
    manifest.scores = report::fingerprint(config.scores_path);
    manifest.wordnet_version = prep.resources.wordnet.version();
    for (const auto& [role, path] : config.resource_paths().entries()) {
      manifest.resources.emplace_back(role, report::fingerprint(path));
    }
    manifest.instance_count = prep.dataset.instances.size();
    manifest.unknown_keys = prep.dataset.unknown_keys;
    manifest.feature_count = prep.matrix.columns.size();
    manifest.tests_run = result.tests_run;
    manifest.warnings = warnings;
    outputs.write("manifest.json", [&](std::ostream& o) { report::write_manifest(o, manifest); });
    outputs.commit();

    for (const auto& w : warnings) log << "warning: " << w << '\n';
    log << prep.dataset.instances.size() << " instances, " << prep.matrix.columns.size() << " features, "
        << result.findings.size() << " findings written to " << config.out_dir.string() << '\n';
    return static_cast<int>(kOk);
  });
}

int cmd_validate(const fs::path& scores_path, std::ostream& out) {
  return guarded(out, [&] {
    std::ifstream in(scores_path, std::ios::binary);
    if (!in) throw UserError("cannot open scores file '" + scores_path.string() + "'");
    const ingest::ValidationReport report = ingest::validate_scores(in);
    for (const auto& issue : report.issues) out << issue.message << '\n';
    if (report.unknown_keys > 0) out << "warning: " << report.unknown_keys << " unknown keys ignored\n";
    if (!report.ok()) {
      out << report.issues.size() << " problems found; " << report.valid << " instances OK\n";
      return static_cast<int>(kValidationError);
    }
    out << report.valid << " instances OK\n";
    return static_cast<int>(kOk);
  });
}

int cmd_dump_features(const Config& config, const fs::path& out_path, std::ostream& log) {
  return guarded(log, [&] {
    Prepared prep = prepare(config, log);
    if (out_path.empty() || out_path == "-") {
      featurize::write_matrix_csv(std::cout, prep.matrix);
    } else {
      OutputSet outputs(out_path.parent_path());
      outputs.write(out_path.filename(), [&](std::ostream& o) { featurize::write_matrix_csv(o, prep.matrix); });
      outputs.commit();
    }
    for (const auto& w : prep.matrix.warnings) log << "warning: " << w << '\n';
    return static_cast<int>(kOk);
  });
}

// ---------------------------------------------------------------------------

namespace {

std::vector<analyze::Target> parse_targets(const std::vector<std::string>& items) {
  std::vector<analyze::Target> out;
  for (const auto& raw : items) {
    std::string item;
    for (char c : raw) item += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (item == "p") {
      out.push_back(analyze::Target::p);
    } else if (item == "n") {
      out.push_back(analyze::Target::n);
    } else if (item == "d") {
      out.push_back(analyze::Target::d);
    } else {
      throw UserError("unknown target '" + raw + "' (expected p, n or d)");
    }
  }
  return out;
}

void add_pipeline_options(CLI::App& cmd, Config& config) {
  cmd.add_option("--scores-path,--scores", config.scores_path, "Scores interchange file (JSON lines)")->required();
  cmd.add_option("--resources-dir,--resources", config.resources_dir, "Directory holding the lexical resources")
      ->envname("VLM_PROBE_RESOURCES");
  cmd.add_option("--data-noun", config.overrides.data_noun, "Override path of data.noun");
  cmd.add_option("--data-verb", config.overrides.data_verb, "Override path of data.verb");
  cmd.add_option("--index-noun", config.overrides.index_noun, "Override path of index.noun");
  cmd.add_option("--index-verb", config.overrides.index_verb, "Override path of index.verb");
  cmd.add_option("--liwc", config.overrides.liwc, "Override path of liwc.dic");
  cmd.add_option("--levin", config.overrides.levin, "Override path of levin.tsv");
  cmd.add_option("--inquirer", config.overrides.inquirer, "Override path of inquirer.tsv");
  cmd.add_option("--concreteness", config.overrides.concreteness, "Override path of concreteness.tsv");
  cmd.add_option("--frequency", config.overrides.frequency, "Override path of frequency.tsv");
  cmd.add_option("--min-support,--min_support", config.min_support, "Minimum support of a binary feature")
      ->capture_default_str();
  cmd.add_option("--frequency-transform,--frequency_transform", config.frequency_transform,
                 "Transform applied to corpus counts")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, featurize::FrequencyTransform>{{"log10p1", featurize::FrequencyTransform::log10p1},
                                                               {"raw", featurize::FrequencyTransform::raw}},
          CLI::ignore_case)
                     .description(""))
      ->type_name("{log10p1,raw}")
      ->default_str("log10p1");
  cmd.add_option("--jobs", config.jobs, "Worker threads")->default_str("hardware concurrency");
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Correlates lexical and semantic features of benchmark captions with vision-language model scores"};
  app.set_version_flag("--version", std::string(VLMPROBE_VERSION));
  app.require_subcommand(1);

  Config config;
  config.jobs = default_jobs();
  std::vector<std::string> targets{"p", "n", "d"};

  auto* analyze_cmd = app.add_subcommand("analyze", "Run feature extraction and correlation analysis");
  add_pipeline_options(*analyze_cmd, config);
  analyze_cmd->add_option("--out-dir,--out", config.out_dir, "Output directory")->required();
  analyze_cmd->add_option("--targets", targets, "Target scores to analyze (p, n, d)")
      ->delimiter(',')
      ->capture_default_str();
  analyze_cmd->add_option("--alpha", config.alpha, "Significance threshold")->capture_default_str();
  analyze_cmd
      ->add_option("--correction", config.correction, "Multiple-comparison correction")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, analyze::Correction>{{"none", analyze::Correction::none},
                                                     {"bonferroni", analyze::Correction::bonferroni},
                                                     {"benjamini_hochberg", analyze::Correction::benjamini_hochberg},
                                                     {"bh", analyze::Correction::benjamini_hochberg}},
          CLI::ignore_case)
                     .description(""))
      ->type_name("{none,bonferroni,benjamini_hochberg,bh}")
      ->default_str("none");
  analyze_cmd
      ->add_option("--format", config.format, "Findings file format")
      ->transform(CLI::CheckedTransformer(std::map<std::string, report::Format>{{"csv", report::Format::csv},
                                                                                {"json", report::Format::json},
                                                                                {"markdown", report::Format::markdown},
                                                                                {"md", report::Format::markdown}},
                                          CLI::ignore_case)
                     .description(""))
      ->type_name("{csv,json,markdown}")
      ->default_str("csv");
  analyze_cmd->add_flag("--emit-matrix,--emit_matrix", config.emit_matrix, "Also write features.csv");
  analyze_cmd->add_flag("--emit-plots,--emit_plots", config.emit_plots, "Also write plot data under plots/");

  fs::path validate_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a scores interchange file");
  validate_cmd->add_option("scores_path", validate_path, "Scores interchange file")->required();

  fs::path dump_out = "-";
  auto* dump_cmd = app.add_subcommand("dump-features", "Write the standardized feature matrix as CSV");
  add_pipeline_options(*dump_cmd, config);
  dump_cmd->add_option("--out", dump_out, "Output CSV file ('-' for stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidationError;
  }

  if (*validate_cmd) return cmd_validate(validate_path, std::cout);
  if (*dump_cmd) return cmd_dump_features(config, dump_out, std::cerr);
  try {
    config.targets = parse_targets(targets);
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidationError;
  }
  return cmd_analyze(config, std::cerr);
}

}  // namespace vlmprobe::cli
