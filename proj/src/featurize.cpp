#include "vlmprobe/featurize.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "csv.hpp"
#include "text.hpp"
#include "vlmprobe/error.hpp"
#include "vlmprobe/parallel.hpp"

namespace vlmprobe::featurize {
namespace {

using ingest::BenchmarkInstance;
using ingest::Slot;
using ingest::SlotWord;
using ingest::WordRoles;

constexpr std::array kWordRoles = {Role::in_common, Role::original, Role::replacement};
constexpr std::array kBinaryFamilies = {Family::levin, Family::liwc, Family::gi, Family::hyper, Family::word};

std::vector<const SlotWord*> role_words(const WordRoles& roles, Role role) {
  switch (role) {
    case Role::in_common: return {&roles.in_common[0], &roles.in_common[1]};
    case Role::original: return {&roles.original};
    case Role::replacement: return {&roles.replacement};
    case Role::sentence: break;
  }
  return {};
}

std::string binary_name(Family family, std::string_view base, Role role) {
  return std::string(family_name(family)) + ':' + std::string(base) + '@' + std::string(role_name(role));
}

// Looks up the column bases a single word switches on for one family.
class TriggerSource {
 public:
  TriggerSource(const lexres::Resources& resources, Family family) : res_(resources), family_(family) {}

  std::vector<std::string> bases(const SlotWord& w) {
    switch (family_) {
      case Family::levin:
        if (w.slot != Slot::verb) return {};
        return sanitized(res_.levin.lookup(w.lemma));
      case Family::liwc: return sanitized(res_.liwc.lookup(w.lemma));
      case Family::gi: return sanitized(res_.inquirer.lookup(w.lemma));
      case Family::hyper: return hypernyms(w);
      case Family::word: return {sanitize(w.lemma)};
      default: return {};
    }
  }

 private:
  static std::vector<std::string> sanitized(const std::set<std::string>& cats) {
    std::vector<std::string> out;
    out.reserve(cats.size());
    for (const auto& c : cats) out.push_back(sanitize(c));
    return out;
  }

  const std::vector<std::string>& hypernyms(const SlotWord& w) {
    const auto pos = pos_for_slot(w.slot);
    auto key = std::make_pair(w.lemma, pos);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<std::string> names;
    if (const lexres::Synset* s = lexres::most_common_synset(res_.wordnet, w.lemma, pos)) {
      const auto closure = lexres::hypernym_closure(res_.wordnet, *s);
      names.assign(closure.begin(), closure.end());
    }
    return cache_.emplace(std::move(key), std::move(names)).first->second;
  }

  const lexres::Resources& res_;
  Family family_;
  std::map<std::pair<std::string, lexres::PartOfSpeech>, std::vector<std::string>> cache_;
};

std::vector<FeatureColumn> build_family_role(std::span<const WordRoles> roles, const lexres::Resources& resources,
                                             Family family, Role role, std::size_t min_support) {
  struct Accum {
    std::vector<std::uint32_t> rows;
    std::map<std::string, std::size_t> triggers;
  };
  std::map<std::string, Accum> acc;
  TriggerSource source(resources, family);
  const std::size_t count = roles.size();

  for (std::size_t i = 0; i < count; ++i) {
    std::map<std::string, std::vector<const std::string*>> fired;
    for (const SlotWord* w : role_words(roles[i], role)) {
      for (auto& base : source.bases(*w)) fired[std::move(base)].push_back(&w->lemma);
    }
    for (auto& [base, lemmas] : fired) {
      Accum& a = acc[base];
      a.rows.push_back(static_cast<std::uint32_t>(i));
      for (const std::string* lemma : lemmas) ++a.triggers[*lemma];
    }
  }

  std::vector<FeatureColumn> out;
  for (auto& [base, a] : acc) {
    const std::size_t support = a.rows.size();
    if (support < min_support || support + min_support > count) continue;
    FeatureColumn col;
    col.name = binary_name(family, base, role);
    col.family = family;
    col.base = base;
    col.role = role;
    col.kind = Kind::binary;
    col.bits.assign(count, 0);
    for (std::uint32_t r : a.rows) col.bits[r] = 1;
    col.support = support;
    col.triggers.assign(a.triggers.begin(), a.triggers.end());
    std::stable_sort(col.triggers.begin(), col.triggers.end(),
                     [](const auto& x, const auto& y) { return x.second > y.second; });
    out.push_back(std::move(col));
  }
  return out;
}

FeatureColumn numeric_column(Family family, std::string base, Role role, std::string name, std::vector<double> values) {
  FeatureColumn col;
  col.name = std::move(name);
  col.family = family;
  col.base = std::move(base);
  col.role = role;
  col.kind = Kind::numeric;
  col.support = static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](double v) { return !is_missing(v); }));
  col.raw = values;
  col.values = std::move(values);
  return col;
}

template <typename Lookup>
double mean_available(const std::vector<const SlotWord*>& words, Lookup&& lookup) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const SlotWord* w : words) {
    if (const std::optional<double> v = lookup(*w)) {
      sum += *v;
      ++n;
    }
  }
  return n == 0 ? kMissing : sum / static_cast<double>(n);
}

}  // namespace

std::string_view role_name(Role role) noexcept {
  switch (role) {
    case Role::in_common: return "in_common";
    case Role::original: return "original";
    case Role::replacement: return "replacement";
    case Role::sentence: return "sentence";
  }
  return "in_common";
}

std::string_view kind_name(Kind kind) noexcept { return kind == Kind::binary ? "binary" : "numeric"; }

std::string_view family_name(Family family) noexcept {
  switch (family) {
    case Family::levin: return "levin";
    case Family::liwc: return "liwc";
    case Family::gi: return "gi";
    case Family::hyper: return "hyper";
    case Family::word: return "word";
    case Family::len: return "len";
    case Family::conc: return "conc";
    case Family::ambig: return "ambig";
    case Family::freq: return "freq";
    case Family::sim: return "sim";
  }
  return "word";
}

const FeatureColumn* FeatureMatrix::find(std::string_view name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string sanitize(std::string_view name) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : text::trim(name)) {
    if (std::isspace(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space) out += '_';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

lexres::PartOfSpeech pos_for_slot(Slot slot) noexcept {
  return slot == Slot::verb ? lexres::PartOfSpeech::verb : lexres::PartOfSpeech::noun;
}

std::vector<FeatureColumn> build_binary_features(std::span<const BenchmarkInstance> instances,
                                                 std::span<const WordRoles> roles,
                                                 const lexres::Resources& resources, std::size_t min_support,
                                                 unsigned jobs) {
  if (instances.size() != roles.size()) throw DimensionMismatch("instances and roles differ in length");
  std::vector<std::pair<Family, Role>> tasks;
  for (Family f : kBinaryFamilies) {
    for (Role r : kWordRoles) tasks.emplace_back(f, r);
  }
  std::vector<std::vector<FeatureColumn>> results(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    results[t] = build_family_role(roles, resources, tasks[t].first, tasks[t].second, min_support);
  });
  std::vector<FeatureColumn> out;
  for (auto& r : results) std::move(r.begin(), r.end(), std::back_inserter(out));
  return out;
}

std::vector<FeatureColumn> build_numeric_features(std::span<const BenchmarkInstance> instances,
                                                  std::span<const WordRoles> roles,
                                                  const lexres::Resources& resources,
                                                  FrequencyTransform frequency_transform) {
  if (instances.size() != roles.size()) throw DimensionMismatch("instances and roles differ in length");
  const std::size_t count = instances.size();
  std::vector<FeatureColumn> out;

  std::vector<double> lengths(count);
  for (std::size_t i = 0; i < count; ++i) {
    lengths[i] = static_cast<double>(text::split_ws(instances[i].sentence).size());
  }
  out.push_back(numeric_column(Family::len, "sentence", Role::sentence, "len:sentence", std::move(lengths)));

  auto concreteness = [&](const SlotWord& w) { return resources.concreteness.lookup(w.lemma); };
  auto ambiguity = [&](const SlotWord& w) -> std::optional<double> {
    const std::size_t n = lexres::synset_count(resources.wordnet, w.lemma, pos_for_slot(w.slot));
    if (n == 0) return std::nullopt;
    return static_cast<double>(n);
  };
  auto frequency = [&](const SlotWord& w) -> std::optional<double> {
    auto v = resources.frequency.lookup(w.lemma);
    if (v && frequency_transform == FrequencyTransform::log10p1) *v = std::log10(1.0 + *v);
    return v;
  };

  for (Role role : kWordRoles) {
    std::vector<double> conc(count);
    std::vector<double> ambig(count);
    std::vector<double> freq(count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto words = role_words(roles[i], role);
      conc[i] = mean_available(words, concreteness);
      ambig[i] = mean_available(words, ambiguity);
      freq[i] = mean_available(words, frequency);
    }
    const std::string suffix = "@" + std::string(role_name(role));
    out.push_back(numeric_column(Family::conc, "", role, "conc" + suffix, std::move(conc)));
    out.push_back(numeric_column(Family::ambig, "", role, "ambig" + suffix, std::move(ambig)));
    out.push_back(numeric_column(Family::freq, "", role, "freq" + suffix, std::move(freq)));
  }

  std::vector<double> sim_sentence(count);
  std::vector<double> sim_word(count);
  for (std::size_t i = 0; i < count; ++i) {
    sim_sentence[i] = ingest::sentence_similarity(instances[i]).value_or(kMissing);
    sim_word[i] = ingest::word_similarity(instances[i]).value_or(kMissing);
  }
  out.push_back(numeric_column(Family::sim, "sentence", Role::sentence, "sim:sentence", std::move(sim_sentence)));
  out.push_back(numeric_column(Family::sim, "word", Role::original, "sim:word", std::move(sim_word)));
  return out;
}

FeatureColumn standardize(const FeatureColumn& column) {
  if (column.kind != Kind::numeric) throw DegenerateColumn(column.name + ": only numeric columns are standardized");
  std::vector<double> present;
  present.reserve(column.values.size());
  for (double v : column.values) {
    if (!is_missing(v)) present.push_back(v);
  }
  if (present.size() < 2) {
    throw DegenerateColumn(column.name + ": fewer than two non-missing values");
  }
  double mean = 0.0;
  for (double v : present) mean += v;
  mean /= static_cast<double>(present.size());
  double ss = 0.0;
  for (double v : present) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(present.size() - 1));
  if (!(sd > 0.0)) throw DegenerateColumn(column.name + ": zero variance");

  FeatureColumn out = column;
  for (double& v : out.values) {
    if (!is_missing(v)) v = (v - mean) / sd;
  }
  return out;
}

void sort_columns(std::vector<FeatureColumn>& columns) {
  std::stable_sort(columns.begin(), columns.end(), [](const FeatureColumn& a, const FeatureColumn& b) {
    return std::tie(a.family, a.base, a.role) < std::tie(b.family, b.base, b.role);
  });
}

FeatureMatrix build_feature_matrix(std::span<const BenchmarkInstance> instances, const lexres::Resources& resources,
                                   const FeatureOptions& options) {
  FeatureMatrix matrix;
  std::vector<WordRoles> roles;
  roles.reserve(instances.size());
  for (const auto& inst : instances) {
    matrix.instance_ids.push_back(inst.id);
    roles.push_back(ingest::derive_roles(inst));
  }

  matrix.columns = build_binary_features(instances, roles, resources, options.min_support, options.jobs);
  for (const FeatureColumn& col : build_numeric_features(instances, roles, resources, options.frequency_transform)) {
    try {
      matrix.columns.push_back(standardize(col));
    } catch (const DegenerateColumn& e) {
      matrix.warnings.push_back(std::string("dropped numeric column ") + e.what());
    }
  }
  sort_columns(matrix.columns);
  return matrix;
}

void write_matrix_csv(std::ostream& out, const FeatureMatrix& matrix) {
  out << "id";
  for (const auto& c : matrix.columns) out << ',' << csv::field(c.name);
  out << '\n';
  for (std::size_t i = 0; i < matrix.instance_ids.size(); ++i) {
    out << csv::field(matrix.instance_ids[i]);
    for (const auto& c : matrix.columns) {
      out << ',';
      if (c.kind == Kind::binary) {
        out << static_cast<int>(c.bits[i]);
      } else {
        out << csv::number(c.values[i]);
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("failed writing feature matrix");
}

}  // namespace vlmprobe::featurize
