#pragma once

// Reading the scores interchange file (JSON lines) and deriving the word
// roles of each benchmark instance.

#include <array>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vlmprobe::ingest {

enum class Slot { subject, verb, object };

/// "subject", "verb" or "object".
std::string_view slot_name(Slot slot) noexcept;

struct Triplet {
  std::string subject;
  std::string verb;
  std::string object;

  const std::string& at(Slot slot) const noexcept;
  friend bool operator==(const Triplet&, const Triplet&) = default;
};

struct BenchmarkInstance {
  std::string id;
  std::string sentence;
  Triplet pos_triplet;
  Triplet neg_triplet;
  Slot neg_type = Slot::subject;
  double p = 0;  // caption vs positive image
  double n = 0;  // caption vs negative image
  std::optional<double> sim_sentence;
  std::optional<double> sim_word;
  // Empty when absent. Present vectors share one dimension.
  std::vector<double> emb_original;
  std::vector<double> emb_replacement;
  std::vector<double> emb_sentence;
  std::vector<double> emb_neg_sentence;
};

struct SlotWord {
  std::string lemma;
  Slot slot = Slot::subject;

  friend bool operator==(const SlotWord&, const SlotWord&) = default;
};

struct WordRoles {
  std::array<SlotWord, 2> in_common;  // the two agreeing slots, in S, V, O order
  SlotWord original;                  // caption side of the differing slot
  SlotWord replacement;               // negative-image side of the differing slot
};

struct Dataset {
  std::vector<BenchmarkInstance> instances;
  std::size_t unknown_keys = 0;
};

/// Reads the whole file, preserving order. Throws SchemaError, TripletMismatch
/// or DuplicateId on the first offending line (1-based physical line numbers;
/// blank lines are skipped).
Dataset read_scores(std::istream& in);

struct ValidationIssue {
  std::size_t line = 0;
  std::string message;
};

struct ValidationReport {
  std::size_t valid = 0;
  std::size_t unknown_keys = 0;
  std::vector<ValidationIssue> issues;

  bool ok() const noexcept { return issues.empty(); }
};

/// Like read_scores, but keeps going and reports every violation.
ValidationReport validate_scores(std::istream& in);

/// Writes instances in the interchange format read_scores accepts.
void write_scores(std::ostream& out, std::span<const BenchmarkInstance> instances);

WordRoles derive_roles(const BenchmarkInstance& instance);

/// D = P - N.
double score_d(const BenchmarkInstance& instance) noexcept;

/// dot(u, v) / (|u| |v|) clamped to [-1, 1]. Throws DimensionMismatch or
/// ZeroVector.
double cosine(std::span<const double> u, std::span<const double> v);

/// Precomputed `sim_sentence` if present, else the cosine of the sentence
/// embeddings if both are present.
std::optional<double> sentence_similarity(const BenchmarkInstance& instance);

/// Precomputed `sim_word` if present, else the cosine of the word embeddings.
std::optional<double> word_similarity(const BenchmarkInstance& instance);

}  // namespace vlmprobe::ingest
