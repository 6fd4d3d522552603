#include <algorithm>
#include <cstdio>
#include <regex>
#include <string>

#include "../text.hpp"
#include "vlmprobe/error.hpp"
#include "vlmprobe/lexres.hpp"

namespace vlmprobe::lexres {
namespace {

bool is_header_line(std::string_view line) { return line.size() >= 2 && line[0] == ' ' && line[1] == ' '; }

std::optional<std::string> find_version(std::string_view line) {
  static const std::regex pattern(R"(WordNet\s+([0-9]+(\.[0-9]+)*))");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(line.begin(), line.end(), m, pattern)) return m[1].str();
  return std::nullopt;
}

struct ParseState {
  std::string version;
};

[[noreturn]] void malformed(const char* file, std::size_t line, const std::string& reason) {
  throw MalformedResource(line, std::string(file) + ": " + reason);
}

std::optional<PartOfSpeech> pos_from_code(std::string_view code) {
  if (code == "n") return PartOfSpeech::noun;
  if (code == "v") return PartOfSpeech::verb;
  return std::nullopt;
}

// offset lex_filenum ss_type w_cnt [word lex_id]... p_cnt [sym offset pos st]... | gloss
Synset parse_data_line(std::string_view line, PartOfSpeech expected, const char* file, std::size_t lineno) {
  const std::size_t bar = line.find(" | ");
  const auto tokens = text::split_ws(bar == std::string_view::npos ? line : line.substr(0, bar));
  if (tokens.size() < 6) malformed(file, lineno, "too few fields in data line");

  Synset s;
  const auto offset = text::parse_int<std::uint32_t>(tokens[0]);
  if (!offset) malformed(file, lineno, "bad synset offset '" + std::string(tokens[0]) + "'");
  s.offset = *offset;
  s.pos = expected;
  const auto ss_type = pos_from_code(tokens[2]);
  if (!ss_type || *ss_type != expected) {
    malformed(file, lineno, "unexpected synset type '" + std::string(tokens[2]) + "'");
  }

  const auto w_cnt = text::parse_int<std::size_t>(tokens[3], 16);
  if (!w_cnt || *w_cnt == 0) malformed(file, lineno, "bad word count '" + std::string(tokens[3]) + "'");
  std::size_t i = 4;
  if (tokens.size() < i + 2 * *w_cnt + 1) malformed(file, lineno, "word list shorter than its count");
  for (std::size_t w = 0; w < *w_cnt; ++w, i += 2) {
    s.lemmas.push_back(text::lowercase(tokens[i]));
    if (!text::parse_int<unsigned>(tokens[i + 1], 16)) {
      malformed(file, lineno, "bad lex_id '" + std::string(tokens[i + 1]) + "'");
    }
  }

  const auto p_cnt = text::parse_int<std::size_t>(tokens[i]);
  if (!p_cnt) malformed(file, lineno, "bad pointer count '" + std::string(tokens[i]) + "'");
  ++i;
  if (tokens.size() < i + 4 * *p_cnt) malformed(file, lineno, "pointer list shorter than its count");
  for (std::size_t p = 0; p < *p_cnt; ++p, i += 4) {
    const std::string_view symbol = tokens[i];
    const auto target = text::parse_int<std::uint32_t>(tokens[i + 1]);
    if (!target) malformed(file, lineno, "bad pointer offset '" + std::string(tokens[i + 1]) + "'");
    if (tokens[i + 3].size() != 4 || !text::parse_int<unsigned>(tokens[i + 3], 16)) {
      malformed(file, lineno, "bad source/target field '" + std::string(tokens[i + 3]) + "'");
    }
    if (symbol != "@" && symbol != "@i") continue;
    const auto target_pos = pos_from_code(tokens[i + 2]);
    if (!target_pos || *target_pos != expected) {
      malformed(file, lineno, "hypernym pointer to part of speech '" + std::string(tokens[i + 2]) + "'");
    }
    s.hypernyms.push_back({*target, *target_pos});
  }
  return s;
}

// lemma pos synset_cnt p_cnt [ptr_symbol...] sense_cnt tagsense_cnt offset...
std::pair<std::string, std::vector<std::uint32_t>> parse_index_line(std::string_view line, PartOfSpeech expected,
                                                                   const char* file, std::size_t lineno) {
  const auto tokens = text::split_ws(line);
  if (tokens.size() < 7) malformed(file, lineno, "too few fields in index line");
  const auto pos = pos_from_code(tokens[1]);
  if (!pos || *pos != expected) malformed(file, lineno, "unexpected part of speech '" + std::string(tokens[1]) + "'");
  const auto synset_cnt = text::parse_int<std::size_t>(tokens[2]);
  const auto p_cnt = text::parse_int<std::size_t>(tokens[3]);
  if (!synset_cnt || !p_cnt) malformed(file, lineno, "bad synset or pointer count");
  if (*synset_cnt == 0) malformed(file, lineno, "index entry lists no synsets");
  const std::size_t first_offset = 4 + *p_cnt + 2;
  if (tokens.size() != first_offset + *synset_cnt) {
    malformed(file, lineno, "expected " + std::to_string(first_offset + *synset_cnt) + " fields, found " +
                                std::to_string(tokens.size()));
  }
  std::vector<std::uint32_t> offsets;
  offsets.reserve(*synset_cnt);
  for (std::size_t i = first_offset; i < tokens.size(); ++i) {
    const auto off = text::parse_int<std::uint32_t>(tokens[i]);
    if (!off) malformed(file, lineno, "bad offset '" + std::string(tokens[i]) + "'");
    offsets.push_back(*off);
  }
  return {text::lowercase(tokens[0]), std::move(offsets)};
}

template <typename OnLine>
void for_each_line(std::istream& in, std::string& version, OnLine&& on_line) {
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string_view line = text::chomp(raw);
    if (is_header_line(line)) {
      if (version.empty()) {
        if (auto v = find_version(line)) version = *v;
      }
      continue;
    }
    if (text::trim(line).empty()) continue;
    on_line(line, lineno);
  }
}

}  // namespace

char pos_code(PartOfSpeech pos) noexcept { return pos == PartOfSpeech::noun ? 'n' : 'v'; }

const Synset* WordNetDb::find(SynsetRef ref) const {
  const auto it = synsets_.find(key(ref));
  return it == synsets_.end() ? nullptr : &it->second;
}

std::span<const std::uint32_t> WordNetDb::senses(std::string_view lemma, PartOfSpeech pos) const {
  const auto& idx = index_[pos == PartOfSpeech::verb];
  const auto it = idx.find(lemma);
  if (it == idx.end()) return {};
  return it->second;
}

std::size_t WordNetDb::index_size(PartOfSpeech pos) const noexcept { return index_[pos == PartOfSpeech::verb].size(); }

WordNetDb parse_wordnet(std::istream& data_noun, std::istream& data_verb, std::istream& index_noun,
                        std::istream& index_verb) {
  WordNetDb db;
  std::string version;

  auto read_data = [&](std::istream& in, PartOfSpeech pos, const char* file) {
    for_each_line(in, version, [&](std::string_view line, std::size_t lineno) {
      Synset s = parse_data_line(line, pos, file, lineno);
      const auto k = WordNetDb::key(s.ref());
      if (!db.synsets_.emplace(k, std::move(s)).second) malformed(file, lineno, "duplicate synset offset");
    });
  };
  auto read_index = [&](std::istream& in, PartOfSpeech pos, const char* file) {
    auto& idx = db.index_[pos == PartOfSpeech::verb];
    for_each_line(in, version, [&](std::string_view line, std::size_t lineno) {
      auto [lemma, offsets] = parse_index_line(line, pos, file, lineno);
      for (std::uint32_t off : offsets) {
        if (!db.find({off, pos})) {
          throw DanglingReference(std::string(file) + ": line " + std::to_string(lineno) + ": '" + lemma +
                                  "' lists offset " + std::to_string(off) + " absent from the data file");
        }
      }
      if (!idx.emplace(std::move(lemma), std::move(offsets)).second) {
        malformed(file, lineno, "duplicate index entry");
      }
    });
  };

  read_data(data_noun, PartOfSpeech::noun, "data.noun");
  read_data(data_verb, PartOfSpeech::verb, "data.verb");
  read_index(index_noun, PartOfSpeech::noun, "index.noun");
  read_index(index_verb, PartOfSpeech::verb, "index.verb");

  for (auto& [k, s] : db.synsets_) {
    for (const SynsetRef& h : s.hypernyms) {
      if (!db.find(h)) {
        throw DanglingReference("synset " + std::to_string(s.offset) + " has hypernym " +
                                std::to_string(h.offset) + " absent from the data file");
      }
    }
    // Sense number of the synset within its first lemma's index entry; if the
    // lemma is not indexed fall back to lex_id order (1).
    const auto senses = db.senses(s.lemmas.front(), s.pos);
    const auto at = std::find(senses.begin(), senses.end(), s.offset);
    const std::size_t sense = at == senses.end() ? 1 : static_cast<std::size_t>(at - senses.begin()) + 1;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02zu", sense);
    s.name = s.lemmas.front() + '.' + pos_code(s.pos) + '.' + buf;
  }

  if (!version.empty()) db.version_ = version;
  return db;
}

const Synset* most_common_synset(const WordNetDb& db, std::string_view lemma, PartOfSpeech pos) {
  const auto senses = db.senses(lemma, pos);
  if (senses.empty()) return nullptr;
  return db.find({senses.front(), pos});
}

std::size_t synset_count(const WordNetDb& db, std::string_view lemma, PartOfSpeech pos) {
  return db.senses(lemma, pos).size();
}

std::set<std::string> hypernym_closure(const WordNetDb& db, const Synset& synset) {
  std::set<std::string> names;
  std::set<SynsetRef> done;
  std::set<SynsetRef> on_path;

  // Iterative DFS; a frame remembers which parent to visit next.
  struct Frame {
    const Synset* node;
    std::size_t next;
  };
  std::vector<Frame> stack{{&synset, 0}};
  on_path.insert(synset.ref());
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next == top.node->hypernyms.size()) {
      on_path.erase(top.node->ref());
      done.insert(top.node->ref());
      stack.pop_back();
      continue;
    }
    const SynsetRef parent_ref = top.node->hypernyms[top.next++];
    if (on_path.count(parent_ref)) {
      throw CycleDetected("hypernym cycle through synset " + std::to_string(parent_ref.offset));
    }
    if (done.count(parent_ref)) continue;
    const Synset* parent = db.find(parent_ref);
    if (!parent) throw DanglingReference("hypernym " + std::to_string(parent_ref.offset) + " not in database");
    names.insert(parent->name);
    on_path.insert(parent_ref);
    stack.push_back({parent, 0});
  }
  return names;
}

}  // namespace vlmprobe::lexres
