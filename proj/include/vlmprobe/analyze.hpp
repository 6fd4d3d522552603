#pragma once

// Feature selection over target scores P, N and D: Welch t-tests for binary
// features, Pearson correlation for numeric ones, significance filtering with
// optional multiple-comparison correction, and deterministic ranking.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlmprobe/featurize.hpp"
#include "vlmprobe/ingest.hpp"
#include "vlmprobe/stats.hpp"

namespace vlmprobe::analyze {

enum class Target { p, n, d };
enum class Correction { none, bonferroni, benjamini_hochberg };

/// "P", "N", "D".
std::string_view target_name(Target target) noexcept;
std::string_view correction_name(Correction correction) noexcept;

struct TargetScores {
  std::vector<double> p;
  std::vector<double> n;
  std::vector<double> d;

  const std::vector<double>& of(Target target) const noexcept;
};

TargetScores target_scores(std::span<const ingest::BenchmarkInstance> instances);

/// Original/replacement features describe the negative image only, so they
/// are not tested against P.
bool applies(featurize::Role role, Target target) noexcept;

struct Finding {
  std::string feature_name;
  featurize::Role role = featurize::Role::in_common;
  Target target = Target::d;
  featurize::Kind kind = featurize::Kind::binary;
  double effect = 0;  // mean difference (binary) or r (numeric)
  double statistic = 0;
  double df = 0;
  double p_raw = 1;
  double p_adjusted = 1;
  std::size_t n_effective = 0;
  std::vector<std::string> example_words;
};

struct AnalysisOptions {
  double alpha = 0.05;
  Correction correction = Correction::none;
  std::vector<Target> targets = {Target::p, Target::n, Target::d};
  unsigned jobs = 1;
};

struct AnalysisResult {
  std::vector<Finding> findings;   // significant only, ranked
  std::vector<std::string> warnings;
  std::size_t tests_run = 0;
};

/// Adjusted p-values in input order. Bonferroni: min(1, m p). Benjamini-
/// Hochberg: step-up q-values, made monotone and capped at 1.
std::vector<double> adjust_p_values(std::span<const double> p_raw, Correction correction);

/// Tests every applicable (feature, target) pair. A kernel failure on one
/// feature is recorded as a warning and that feature is skipped. Findings
/// with p_adjusted < alpha are kept, ordered by target, then |effect|
/// descending, then p_adjusted, then name.
AnalysisResult run_correlation(const featurize::FeatureMatrix& matrix, const TargetScores& targets,
                               const AnalysisOptions& options);

struct SlotAccuracy {
  std::size_t correct = 0;
  std::size_t total = 0;
  double accuracy() const noexcept { return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total); }
};

struct AccuracyReport {
  SlotAccuracy subject;
  SlotAccuracy verb;
  SlotAccuracy object;
  SlotAccuracy overall;
};

/// Fraction of instances with p > n (ties count as failures), by replaced slot.
AccuracyReport accuracy_by_slot(std::span<const ingest::BenchmarkInstance> instances);

struct OverlapSummary {
  std::vector<stats::HistogramBin> p_bins;
  std::vector<stats::HistogramBin> n_bins;
  double overlap = 0;  // sum over bins of min(relative frequency of P, of N)
};

/// P and N histograms over their common range.
OverlapSummary overlap_summary(std::span<const ingest::BenchmarkInstance> instances, std::size_t bin_count);

}  // namespace vlmprobe::analyze
