#pragma once

// On-disk outputs: findings tables, accuracy report, plot data and the run
// manifest. Floating-point values are written with 17 significant digits.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vlmprobe/analyze.hpp"
#include "vlmprobe/stats.hpp"

namespace vlmprobe::report {

enum class Format { csv, json, markdown };

/// "csv", "json" or "md".
std::string_view file_extension(Format format) noexcept;

/// CSV columns: feature,role,target,kind,effect,statistic,df,p_raw,p_adjusted,
/// n_effective,example_words (example words joined with ';'). Markdown splits
/// the rows into positive and negative effect tables.
void write_findings(std::ostream& out, std::span<const analyze::Finding> findings, Format format);

/// Parses a findings CSV written by write_findings.
std::vector<analyze::Finding> read_findings_csv(std::istream& in);

void write_accuracy(std::ostream& out, const analyze::AccuracyReport& report);

/// edge_lo,edge_hi,count_p,count_n
void write_histogram_plot(std::ostream& out, const analyze::OverlapSummary& summary);

/// x,y_hat,ci_lo,ci_hi
void write_regression_plot(std::ostream& out, const stats::RegressionBand& band);

/// x,y sidecar with the raw points behind a regression plot. NaN pairs are
/// skipped.
void write_points(std::ostream& out, std::span<const double> x, std::span<const double> y);

struct BoxGroup {
  double key = 0;
  stats::BoxSummary box;
};

/// Groups `values` by exact `keys` value, ascending.
std::vector<BoxGroup> box_by_group(std::span<const double> keys, std::span<const double> values);

/// group,n,q1,median,q3,whisker_lo,whisker_hi,outliers
void write_box_plot(std::ostream& out, std::span<const BoxGroup> groups);

struct FileFingerprint {
  std::string name;  // file name only, so relocating inputs keeps the manifest stable
  std::uintmax_t bytes = 0;
  std::string fnv1a64;
};

/// Size and FNV-1a 64-bit content hash. Throws IoError if unreadable.
FileFingerprint fingerprint(const std::filesystem::path& path);

struct RunManifest {
  std::string tool_version;
  std::string timestamp;  // ISO-8601 UTC
  double alpha = 0.05;
  std::string correction;
  std::size_t min_support = 10;
  std::string frequency_transform;
  std::vector<std::string> targets;
  std::string format;
  bool emit_matrix = false;
  bool emit_plots = false;
  FileFingerprint scores;
  std::string wordnet_version;
  std::vector<std::pair<std::string, FileFingerprint>> resources;
  std::size_t instance_count = 0;
  std::size_t unknown_keys = 0;
  std::size_t feature_count = 0;
  std::size_t tests_run = 0;
  std::map<std::string, std::size_t> findings_per_target;
  std::vector<std::string> warnings;
};

void write_manifest(std::ostream& out, const RunManifest& manifest);

}  // namespace vlmprobe::report
