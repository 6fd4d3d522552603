#include "vlmprobe/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <tuple>

#include "vlmprobe/error.hpp"
#include "vlmprobe/parallel.hpp"

namespace vlmprobe::analyze {
namespace {

using featurize::FeatureColumn;
using featurize::Kind;

constexpr std::size_t kExampleWords = 5;

struct Outcome {
  std::optional<Finding> finding;
  std::string warning;
};

Outcome test_feature(const FeatureColumn& col, const std::vector<double>& y, Target target) {
  Outcome out;
  Finding f;
  f.feature_name = col.name;
  f.role = col.role;
  f.target = target;
  f.kind = col.kind;
  try {
    if (col.kind == Kind::binary) {
      std::vector<double> on;
      std::vector<double> off;
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (std::isnan(y[i])) continue;
        (col.bits[i] ? on : off).push_back(y[i]);
      }
      const stats::WelchResult w = stats::welch_ttest(on, off);
      f.effect = w.mean_diff;
      f.statistic = w.t;
      f.df = w.df;
      f.p_raw = w.p;
      f.n_effective = w.n_true + w.n_false;
      for (std::size_t k = 0; k < col.triggers.size() && k < kExampleWords; ++k) {
        f.example_words.push_back(col.triggers[k].first);
      }
    } else {
      const stats::PearsonResult r = stats::pearson(col.values, y);
      f.effect = r.r;
      f.statistic = r.t;
      f.df = r.df;
      f.p_raw = r.p;
      f.n_effective = r.n;
    }
    f.p_adjusted = f.p_raw;
    out.finding = std::move(f);
  } catch (const Error& e) {
    out.warning = "skipped " + col.name + " vs " + std::string(target_name(target)) + ": " + e.what();
  }
  return out;
}

}  // namespace

std::string_view target_name(Target target) noexcept {
  switch (target) {
    case Target::p: return "P";
    case Target::n: return "N";
    case Target::d: return "D";
  }
  return "D";
}

std::string_view correction_name(Correction correction) noexcept {
  switch (correction) {
    case Correction::none: return "none";
    case Correction::bonferroni: return "bonferroni";
    case Correction::benjamini_hochberg: return "benjamini_hochberg";
  }
  return "none";
}

const std::vector<double>& TargetScores::of(Target target) const noexcept {
  switch (target) {
    case Target::p: return p;
    case Target::n: return n;
    case Target::d: return d;
  }
  return d;
}

TargetScores target_scores(std::span<const ingest::BenchmarkInstance> instances) {
  TargetScores t;
  t.p.reserve(instances.size());
  t.n.reserve(instances.size());
  t.d.reserve(instances.size());
  for (const auto& inst : instances) {
    t.p.push_back(inst.p);
    t.n.push_back(inst.n);
    t.d.push_back(ingest::score_d(inst));
  }
  return t;
}

bool applies(featurize::Role role, Target target) noexcept {
  if (target != Target::p) return true;
  return role == featurize::Role::in_common || role == featurize::Role::sentence;
}

std::vector<double> adjust_p_values(std::span<const double> p_raw, Correction correction) {
  const std::size_t m = p_raw.size();
  std::vector<double> adjusted(p_raw.begin(), p_raw.end());
  if (m == 0 || correction == Correction::none) return adjusted;
  if (correction == Correction::bonferroni) {
    for (double& p : adjusted) p = std::min(1.0, static_cast<double>(m) * p);
    return adjusted;
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_raw[a] < p_raw[b]; });
  double running = 1.0;
  for (std::size_t k = m; k-- > 0;) {
    const std::size_t i = order[k];
    const double q = p_raw[i] * static_cast<double>(m) / static_cast<double>(k + 1);
    running = std::min(running, q);
    adjusted[i] = std::max(std::min(1.0, running), p_raw[i]);
  }
  return adjusted;
}

AnalysisResult run_correlation(const featurize::FeatureMatrix& matrix, const TargetScores& targets,
                               const AnalysisOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const std::size_t count = matrix.instance_ids.size();
  for (Target t : {Target::p, Target::n, Target::d}) {
    if (targets.of(t).size() != count) throw DimensionMismatch("target scores and matrix differ in length");
  }
  for (const auto& col : matrix.columns) {
    if (col.size() != count) throw DimensionMismatch("column " + col.name + " has the wrong length");
  }

  std::vector<Target> wanted = options.targets;
  std::sort(wanted.begin(), wanted.end());
  wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

  struct Task {
    const FeatureColumn* column;
    Target target;
  };
  std::vector<Task> tasks;
  for (Target t : wanted) {
    for (const auto& col : matrix.columns) {
      if (applies(col.role, t)) tasks.push_back({&col, t});
    }
  }

  std::vector<Outcome> outcomes(tasks.size());
  parallel_for(tasks.size(), options.jobs, [&](std::size_t i) {
    outcomes[i] = test_feature(*tasks[i].column, targets.of(tasks[i].target), tasks[i].target);
  });

  AnalysisResult result;
  for (Target t : wanted) {
    std::vector<Finding> tested;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (tasks[i].target != t) continue;
      if (outcomes[i].finding) {
        tested.push_back(std::move(*outcomes[i].finding));
      } else {
        result.warnings.push_back(std::move(outcomes[i].warning));
      }
    }
    result.tests_run += tested.size();

    std::vector<double> raw(tested.size());
    std::transform(tested.begin(), tested.end(), raw.begin(), [](const Finding& f) { return f.p_raw; });
    const std::vector<double> adjusted = adjust_p_values(raw, options.correction);

    std::vector<Finding> kept;
    for (std::size_t i = 0; i < tested.size(); ++i) {
      tested[i].p_adjusted = adjusted[i];
      if (adjusted[i] < options.alpha) kept.push_back(std::move(tested[i]));
    }
    std::sort(kept.begin(), kept.end(), [](const Finding& a, const Finding& b) {
      const double ea = std::abs(a.effect);
      const double eb = std::abs(b.effect);
      return std::tie(eb, a.p_adjusted, a.feature_name) < std::tie(ea, b.p_adjusted, b.feature_name);
    });
    std::move(kept.begin(), kept.end(), std::back_inserter(result.findings));
  }
  return result;
}

AccuracyReport accuracy_by_slot(std::span<const ingest::BenchmarkInstance> instances) {
  if (instances.empty()) throw EmptyInput("accuracy of an empty instance list");
  AccuracyReport report;
  for (const auto& inst : instances) {
    SlotAccuracy* slot = nullptr;
    switch (inst.neg_type) {
      case ingest::Slot::subject: slot = &report.subject; break;
      case ingest::Slot::verb: slot = &report.verb; break;
      case ingest::Slot::object: slot = &report.object; break;
    }
    const bool correct = inst.p > inst.n;
    ++slot->total;
    ++report.overall.total;
    if (correct) {
      ++slot->correct;
      ++report.overall.correct;
    }
  }
  return report;
}

OverlapSummary overlap_summary(std::span<const ingest::BenchmarkInstance> instances, std::size_t bin_count) {
  if (instances.empty()) throw EmptyInput("overlap summary of an empty instance list");
  const TargetScores scores = target_scores(instances);
  double lo = std::min(*std::min_element(scores.p.begin(), scores.p.end()),
                       *std::min_element(scores.n.begin(), scores.n.end()));
  double hi = std::max(*std::max_element(scores.p.begin(), scores.p.end()),
                       *std::max_element(scores.n.begin(), scores.n.end()));
  if (lo == hi) {
    const double pad = std::max(std::abs(lo), 1.0) * 64.0 * std::numeric_limits<double>::epsilon();
    lo -= pad;
    hi += pad;
  }
  OverlapSummary out;
  out.p_bins = stats::histogram(scores.p, bin_count, lo, hi);
  out.n_bins = stats::histogram(scores.n, bin_count, lo, hi);
  const double total = static_cast<double>(instances.size());
  for (std::size_t b = 0; b < bin_count; ++b) {
    out.overlap += std::min(static_cast<double>(out.p_bins[b].count) / total,
                            static_cast<double>(out.n_bins[b].count) / total);
  }
  return out;
}

}  // namespace vlmprobe::analyze
