#include "vlmprobe/report.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include <json.hpp>

#include "csv.hpp"
#include "text.hpp"
#include "vlmprobe/error.hpp"

namespace vlmprobe::report {
namespace {

using analyze::Finding;
using nlohmann::ordered_json;

constexpr const char* kFindingsHeader =
    "feature,role,target,kind,effect,statistic,df,p_raw,p_adjusted,n_effective,example_words";

std::string join(const std::vector<std::string>& words, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += sep;
    out += words[i];
  }
  return out;
}

// JSON has no infinities; a perfect correlation's t is written as null.
ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

void check(std::ostream& out, const char* what) {
  if (!out) throw IoError(std::string("failed writing ") + what);
}

featurize::Role parse_role(const std::string& s) {
  for (auto r : {featurize::Role::in_common, featurize::Role::original, featurize::Role::replacement,
                 featurize::Role::sentence}) {
    if (featurize::role_name(r) == s) return r;
  }
  throw IoError("unknown role '" + s + "' in findings file");
}

analyze::Target parse_target(const std::string& s) {
  for (auto t : {analyze::Target::p, analyze::Target::n, analyze::Target::d}) {
    if (analyze::target_name(t) == s) return t;
  }
  throw IoError("unknown target '" + s + "' in findings file");
}

double parse_number(const std::string& s) {
  const auto v = text::parse_double(s);
  if (!v) throw IoError("bad number '" + s + "' in findings file");
  return *v;
}

void write_findings_csv(std::ostream& out, std::span<const Finding> findings) {
  out << kFindingsHeader << '\n';
  for (const Finding& f : findings) {
    out << csv::field(f.feature_name) << ',' << featurize::role_name(f.role) << ',' << analyze::target_name(f.target)
        << ',' << featurize::kind_name(f.kind) << ',' << csv::number(f.effect) << ',' << csv::number(f.statistic)
        << ',' << csv::number(f.df) << ',' << csv::number(f.p_raw) << ',' << csv::number(f.p_adjusted) << ','
        << f.n_effective << ',' << csv::field(join(f.example_words, ";")) << '\n';
  }
}

void write_findings_json(std::ostream& out, std::span<const Finding> findings) {
  ordered_json arr = ordered_json::array();
  for (const Finding& f : findings) {
    arr.push_back({{"feature", f.feature_name},
                   {"role", featurize::role_name(f.role)},
                   {"target", analyze::target_name(f.target)},
                   {"kind", featurize::kind_name(f.kind)},
                   {"effect", json_number(f.effect)},
                   {"statistic", json_number(f.statistic)},
                   {"df", json_number(f.df)},
                   {"p_raw", json_number(f.p_raw)},
                   {"p_adjusted", json_number(f.p_adjusted)},
                   {"n_effective", f.n_effective},
                   {"example_words", f.example_words}});
  }
  out << arr.dump(2) << '\n';
}

std::string markdown_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

void write_markdown_section(std::ostream& out, const char* title, std::span<const Finding> findings, bool positive) {
  out << "## " << title << "\n\n";
  out << "| Target | Feature | Role | Kind | Effect | p (adjusted) | Example words |\n";
  out << "|---|---|---|---|---:|---:|---|\n";
  char effect[32];
  char p[32];
  for (const Finding& f : findings) {
    if ((f.effect >= 0.0) != positive) continue;
    std::snprintf(effect, sizeof effect, "%.3f", f.effect);
    std::snprintf(p, sizeof p, "%.3g", f.p_adjusted);
    out << "| " << analyze::target_name(f.target) << " | " << markdown_cell(f.feature_name) << " | "
        << featurize::role_name(f.role) << " | " << featurize::kind_name(f.kind) << " | " << effect << " | " << p
        << " | " << markdown_cell(join(f.example_words, ", ")) << " |\n";
  }
  out << '\n';
}

void write_findings_markdown(std::ostream& out, std::span<const Finding> findings) {
  out << "# Findings\n\n";
  write_markdown_section(out, "Positive effects", findings, true);
  write_markdown_section(out, "Negative effects", findings, false);
}

ordered_json slot_json(const analyze::SlotAccuracy& s) {
  return {{"correct", s.correct}, {"total", s.total}, {"accuracy", s.accuracy()}};
}

ordered_json fingerprint_json(const FileFingerprint& f) {
  return {{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", f.fnv1a64}};
}

}  // namespace

std::string_view file_extension(Format format) noexcept {
  switch (format) {
    case Format::csv: return "csv";
    case Format::json: return "json";
    case Format::markdown: return "md";
  }
  return "csv";
}

void write_findings(std::ostream& out, std::span<const Finding> findings, Format format) {
  switch (format) {
    case Format::csv: write_findings_csv(out, findings); break;
    case Format::json: write_findings_json(out, findings); break;
    case Format::markdown: write_findings_markdown(out, findings); break;
  }
  check(out, "findings");
}

std::vector<Finding> read_findings_csv(std::istream& in) {
  std::vector<std::string> fields;
  if (!csv::read_record(in, fields)) throw IoError("empty findings file");
  std::vector<Finding> out;
  while (csv::read_record(in, fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != 11) throw IoError("findings row with " + std::to_string(fields.size()) + " fields");
    Finding f;
    f.feature_name = fields[0];
    f.role = parse_role(fields[1]);
    f.target = parse_target(fields[2]);
    if (fields[3] == "binary") {
      f.kind = featurize::Kind::binary;
    } else if (fields[3] == "numeric") {
      f.kind = featurize::Kind::numeric;
    } else {
      throw IoError("unknown kind '" + fields[3] + "'");
    }
    f.effect = parse_number(fields[4]);
    f.statistic = parse_number(fields[5]);
    f.df = parse_number(fields[6]);
    f.p_raw = parse_number(fields[7]);
    f.p_adjusted = parse_number(fields[8]);
    const auto n = text::parse_int<std::size_t>(fields[9]);
    if (!n) throw IoError("bad n_effective '" + fields[9] + "'");
    f.n_effective = *n;
    if (!fields[10].empty()) {
      for (auto w : text::split(fields[10], ';')) f.example_words.emplace_back(w);
    }
    out.push_back(std::move(f));
  }
  return out;
}

void write_accuracy(std::ostream& out, const analyze::AccuracyReport& report) {
  ordered_json j = {{"subject", slot_json(report.subject)},
                    {"verb", slot_json(report.verb)},
                    {"object", slot_json(report.object)},
                    {"overall", slot_json(report.overall)}};
  out << j.dump(2) << '\n';
  check(out, "accuracy report");
}

void write_histogram_plot(std::ostream& out, const analyze::OverlapSummary& summary) {
  out << "edge_lo,edge_hi,count_p,count_n\n";
  for (std::size_t b = 0; b < summary.p_bins.size(); ++b) {
    out << csv::number(summary.p_bins[b].lower) << ',' << csv::number(summary.p_bins[b].upper) << ','
        << summary.p_bins[b].count << ',' << summary.n_bins[b].count << '\n';
  }
  check(out, "histogram plot");
}

void write_regression_plot(std::ostream& out, const stats::RegressionBand& band) {
  out << "x,y_hat,ci_lo,ci_hi\n";
  for (std::size_t g = 0; g < band.x_grid.size(); ++g) {
    out << csv::number(band.x_grid[g]) << ',' << csv::number(band.y_hat[g]) << ',' << csv::number(band.lo[g]) << ','
        << csv::number(band.hi[g]) << '\n';
  }
  check(out, "regression plot");
}

void write_points(std::ostream& out, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("point arrays differ in length");
  out << "x,y\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (std::isnan(x[i]) || std::isnan(y[i])) continue;
    out << csv::number(x[i]) << ',' << csv::number(y[i]) << '\n';
  }
  check(out, "regression points");
}

std::vector<BoxGroup> box_by_group(std::span<const double> keys, std::span<const double> values) {
  if (keys.size() != values.size()) throw DimensionMismatch("box keys and values differ in length");
  std::map<double, std::vector<double>> groups;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (std::isnan(keys[i]) || std::isnan(values[i])) continue;
    groups[keys[i]].push_back(values[i]);
  }
  std::vector<BoxGroup> out;
  for (const auto& [key, vals] : groups) out.push_back({key, stats::box_summary(vals)});
  return out;
}

void write_box_plot(std::ostream& out, std::span<const BoxGroup> groups) {
  out << "group,n,q1,median,q3,whisker_lo,whisker_hi,outliers\n";
  for (const BoxGroup& g : groups) {
    out << csv::number(g.key) << ',' << g.box.n << ',' << csv::number(g.box.q1) << ',' << csv::number(g.box.median)
        << ',' << csv::number(g.box.q3) << ',' << csv::number(g.box.whisker_lo) << ','
        << csv::number(g.box.whisker_hi) << ',' << g.box.outliers << '\n';
  }
  check(out, "box plot");
}

FileFingerprint fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  std::uintmax_t bytes = 0;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const auto got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 0x100000001b3ULL;
    }
    bytes += got;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016" PRIx64, hash);
  return {path.filename().string(), bytes, hex};
}

void write_manifest(std::ostream& out, const RunManifest& m) {
  ordered_json resources = ordered_json::object();
  for (const auto& [role, fp] : m.resources) resources[role] = fingerprint_json(fp);

  ordered_json j = {
      {"tool", "vlm-probe"},
      {"tool_version", m.tool_version},
      {"timestamp", m.timestamp},
      {"config",
       {{"alpha", m.alpha},
        {"correction", m.correction},
        {"min_support", m.min_support},
        {"frequency_transform", m.frequency_transform},
        {"targets", m.targets},
        {"format", m.format},
        {"emit_matrix", m.emit_matrix},
        {"emit_plots", m.emit_plots}}},
      {"inputs", {{"scores", fingerprint_json(m.scores)}}},
      {"resources", {{"wordnet_version", m.wordnet_version}, {"files", resources}}},
      {"instance_count", m.instance_count},
      {"unknown_keys", m.unknown_keys},
      {"feature_count", m.feature_count},
      {"tests_run", m.tests_run},
      {"findings", m.findings_per_target},
      {"warnings", m.warnings}};
  out << j.dump(2) << '\n';
  check(out, "manifest");
}

}  // namespace vlmprobe::report
