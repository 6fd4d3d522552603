#pragma once

// Lexical resources: WordNet (WNDB files), category lexicons (Levin verb
// classes, LIWC-format dictionaries, General Inquirer) and numeric norms
// (concreteness ratings, corpus frequencies). All structures are immutable
// once parsed and safe to share between threads.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace vlmprobe::lexres {

enum class PartOfSpeech { noun, verb };

/// 'n' or 'v'.
char pos_code(PartOfSpeech pos) noexcept;

struct SynsetRef {
  std::uint32_t offset = 0;
  PartOfSpeech pos = PartOfSpeech::noun;

  friend auto operator<=>(const SynsetRef&, const SynsetRef&) = default;
};

struct Synset {
  std::uint32_t offset = 0;
  PartOfSpeech pos = PartOfSpeech::noun;
  std::vector<std::string> lemmas;     // lowercase, file order
  std::vector<SynsetRef> hypernyms;    // '@' and '@i' pointers only
  std::string name;                    // e.g. "food.n.02"

  SynsetRef ref() const noexcept { return {offset, pos}; }
};

class WordNetDb {
 public:
  const Synset* find(SynsetRef ref) const;

  /// Offsets listed for `lemma` in the index file, in sense order. Empty when
  /// the lemma is not indexed for `pos`.
  std::span<const std::uint32_t> senses(std::string_view lemma, PartOfSpeech pos) const;

  /// Version string found in the license header ("3.0"), or "unknown".
  const std::string& version() const noexcept { return version_; }

  std::size_t size() const noexcept { return synsets_.size(); }
  std::size_t index_size(PartOfSpeech pos) const noexcept;

 private:
  friend WordNetDb parse_wordnet(std::istream&, std::istream&, std::istream&, std::istream&);

  static std::uint64_t key(SynsetRef ref) noexcept {
    return (static_cast<std::uint64_t>(ref.pos == PartOfSpeech::verb) << 32) | ref.offset;
  }

  std::unordered_map<std::uint64_t, Synset> synsets_;
  std::map<std::string, std::vector<std::uint32_t>, std::less<>> index_[2];
  std::string version_ = "unknown";
};

/// Parses the four WNDB files. Lines starting with two spaces are license
/// header lines. Throws MalformedResource on field-count or number errors and
/// DanglingReference when an index offset or hypernym target is missing.
WordNetDb parse_wordnet(std::istream& data_noun, std::istream& data_verb, std::istream& index_noun,
                        std::istream& index_verb);

/// First sense in the index entry (WNDB orders senses by tagged frequency).
const Synset* most_common_synset(const WordNetDb& db, std::string_view lemma, PartOfSpeech pos);

/// Names of all transitive hypernyms of `synset`, excluding itself. Every
/// parent is followed. Throws CycleDetected if a synset recurs on the current
/// path.
std::set<std::string> hypernym_closure(const WordNetDb& db, const Synset& synset);

std::size_t synset_count(const WordNetDb& db, std::string_view lemma, PartOfSpeech pos);

// ---------------------------------------------------------------------------
// Category lexicons
// ---------------------------------------------------------------------------

enum class LexiconSource { levin, liwc, inquirer };

struct CategoryEntries {
  std::set<std::string> exact;
  std::set<std::string> stems;  // prefixes with the trailing '*' removed (liwc only)
};

class CategoryLexicon {
 public:
  explicit CategoryLexicon(LexiconSource source = LexiconSource::levin) : source_(source) {}

  LexiconSource source() const noexcept { return source_; }
  const std::map<std::string, CategoryEntries>& categories() const noexcept { return categories_; }

  /// Adds `entry` under `category`. A trailing '*' marks a stem, which only
  /// LIWC lexicons accept.
  void add(const std::string& category, std::string_view entry, std::size_t line = 0);

  std::set<std::string> lookup(std::string_view lemma) const;

 private:
  LexiconSource source_;
  std::map<std::string, CategoryEntries> categories_;
  std::map<std::string, std::set<std::string>, std::less<>> by_word_;
  std::map<std::string, std::set<std::string>, std::less<>> by_stem_;
};

/// LIWC `.dic`: '%', id/name lines, '%', then `word<TAB>id...` lines.
CategoryLexicon parse_liwc(std::istream& dic);

/// `class_id<TAB>class_name<TAB>verb`, one verb per row.
CategoryLexicon parse_levin(std::istream& tsv);

/// `entry<TAB>cat1,cat2,...`; `#n` sense suffixes are folded into one entry.
CategoryLexicon parse_inquirer(std::istream& tsv);

/// Union of every category whose entries contain `lemma` exactly or, for
/// LIWC, contain a stem that prefixes it.
std::set<std::string> lookup_categories(const CategoryLexicon& lex, std::string_view lemma);

// ---------------------------------------------------------------------------
// Numeric lexicons
// ---------------------------------------------------------------------------

enum class NumericKind { concreteness, frequency };

class NumericLexicon {
 public:
  explicit NumericLexicon(NumericKind kind = NumericKind::concreteness) : kind_(kind) {}

  NumericKind kind() const noexcept { return kind_; }
  std::optional<double> lookup(std::string_view lemma) const;
  const std::map<std::string, double, std::less<>>& values() const noexcept { return values_; }

 private:
  friend NumericLexicon parse_numeric_lexicon(std::istream&, NumericKind);

  NumericKind kind_;
  std::map<std::string, double, std::less<>> values_;
};

/// `word<TAB>value`. Concreteness must lie in [1, 5]; frequencies must be
/// non-negative and repeated words (after lowercasing) are summed.
NumericLexicon parse_numeric_lexicon(std::istream& tsv, NumericKind kind);

std::optional<double> lookup_numeric(const NumericLexicon& lex, std::string_view lemma);

// ---------------------------------------------------------------------------
// Bundles
// ---------------------------------------------------------------------------

struct Resources {
  WordNetDb wordnet;
  CategoryLexicon levin{LexiconSource::levin};
  CategoryLexicon liwc{LexiconSource::liwc};
  CategoryLexicon inquirer{LexiconSource::inquirer};
  NumericLexicon concreteness{NumericKind::concreteness};
  NumericLexicon frequency{NumericKind::frequency};
};

struct ResourcePaths {
  std::filesystem::path data_noun;
  std::filesystem::path data_verb;
  std::filesystem::path index_noun;
  std::filesystem::path index_verb;
  std::filesystem::path liwc;
  std::filesystem::path levin;
  std::filesystem::path inquirer;
  std::filesystem::path concreteness;
  std::filesystem::path frequency;

  /// Conventional file names inside `dir`.
  static ResourcePaths in_directory(const std::filesystem::path& dir);

  /// (role, path) pairs in a fixed order.
  std::vector<std::pair<std::string, std::filesystem::path>> entries() const;
};

/// Opens and parses every resource. Errors are rethrown as ResourceFileError
/// naming the offending file; unreadable files raise ResourceNotFound.
Resources load_resources(const ResourcePaths& paths);

}  // namespace vlmprobe::lexres
