#pragma once

// Feature matrix construction: one-hot lexical features per word role and
// standardized numeric features.
//
// Column names:
//   levin:<class>@<role>   liwc:<cat>@<role>   gi:<cat>@<role>
//   hyper:<synset>@<role>  word:<lemma>@<role>
//   len:sentence  conc@<role>  ambig@<role>  freq@<role>  sim:sentence  sim:word

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vlmprobe/ingest.hpp"
#include "vlmprobe/lexres.hpp"

namespace vlmprobe::featurize {

enum class Role { in_common, original, replacement, sentence };
enum class Kind { binary, numeric };

/// Column families in canonical sort order.
enum class Family { levin, liwc, gi, hyper, word, len, conc, ambig, freq, sim };

enum class FrequencyTransform { log10p1, raw };

std::string_view role_name(Role role) noexcept;
std::string_view kind_name(Kind kind) noexcept;
std::string_view family_name(Family family) noexcept;

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) noexcept { return std::isnan(v); }

struct FeatureColumn {
  std::string name;
  Family family = Family::word;
  std::string base;  // class / category / synset / lemma, or the numeric qualifier
  Role role = Role::in_common;
  Kind kind = Kind::binary;

  std::vector<std::uint8_t> bits;  // binary columns
  std::vector<double> values;      // numeric columns, standardized once assembled; NaN = missing
  std::vector<double> raw;         // numeric columns in original units

  std::size_t support = 0;  // 1s (binary) or non-missing entries (numeric)

  // Binary columns: lemmas that switched the column on, by descending count.
  std::vector<std::pair<std::string, std::size_t>> triggers;

  std::size_t size() const noexcept { return kind == Kind::binary ? bits.size() : values.size(); }
  double value(std::size_t i) const noexcept { return kind == Kind::binary ? bits[i] : values[i]; }
};

struct FeatureMatrix {
  std::vector<std::string> instance_ids;
  std::vector<FeatureColumn> columns;
  std::vector<std::string> warnings;

  const FeatureColumn* find(std::string_view name) const;
};

struct FeatureOptions {
  std::size_t min_support = 10;
  FrequencyTransform frequency_transform = FrequencyTransform::log10p1;
  unsigned jobs = 1;
};

/// Lowercased, whitespace collapsed to '_'.
std::string sanitize(std::string_view name);

/// Part of speech used to query WordNet for a word in `slot`.
lexres::PartOfSpeech pos_for_slot(ingest::Slot slot) noexcept;

/// One-hot columns for every (family, role) pair. In-common columns fire when
/// either in-common word triggers them. Columns with support below
/// `min_support` or above count - min_support are dropped.
std::vector<FeatureColumn> build_binary_features(std::span<const ingest::BenchmarkInstance> instances,
                                                 std::span<const ingest::WordRoles> roles,
                                                 const lexres::Resources& resources, std::size_t min_support,
                                                 unsigned jobs = 1);

/// Unstandardized numeric columns (values == raw). In-common values are the
/// mean of the available word values.
std::vector<FeatureColumn> build_numeric_features(std::span<const ingest::BenchmarkInstance> instances,
                                                  std::span<const ingest::WordRoles> roles,
                                                  const lexres::Resources& resources,
                                                  FrequencyTransform frequency_transform);

/// (x - mean) / s with the sample standard deviation, missing entries kept.
/// Throws DegenerateColumn with fewer than two values or s == 0.
FeatureColumn standardize(const FeatureColumn& column);

/// Sorts by (family, base, role).
void sort_columns(std::vector<FeatureColumn>& columns);

/// Full pipeline: roles, binary and numeric columns, standardization,
/// deterministic ordering. Degenerate numeric columns are dropped and noted
/// in `warnings`.
FeatureMatrix build_feature_matrix(std::span<const ingest::BenchmarkInstance> instances,
                                   const lexres::Resources& resources, const FeatureOptions& options);

/// Wide CSV: `id` then one column per feature; missing values are empty.
void write_matrix_csv(std::ostream& out, const FeatureMatrix& matrix);

}  // namespace vlmprobe::featurize
