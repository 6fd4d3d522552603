#include <cmath>
#include <fstream>
#include <string>

#include "../text.hpp"
#include "vlmprobe/error.hpp"
#include "vlmprobe/lexres.hpp"

namespace vlmprobe::lexres {
namespace {

bool skippable(std::string_view line) {
  const auto t = text::trim(line);
  return t.empty() || t.front() == '#';
}

template <typename OnLine>
void for_each_line(std::istream& in, OnLine&& on_line) {
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    on_line(text::chomp(raw), lineno);
  }
}

}  // namespace

void CategoryLexicon::add(const std::string& category, std::string_view entry, std::size_t line) {
  std::string word = text::lowercase(text::trim(entry));
  if (word.empty()) throw MalformedResource(line, "empty entry");
  bool stem = false;
  if (word.back() == '*') {
    if (source_ != LexiconSource::liwc) throw MalformedResource(line, "stem entry '" + word + "' outside a LIWC lexicon");
    word.pop_back();
    stem = true;
  }
  if (word.empty() || word.find('*') != std::string::npos) {
    throw MalformedResource(line, "wildcard inside entry '" + std::string(entry) + "'");
  }
  auto& entries = categories_[category];
  if (stem) {
    entries.stems.insert(word);
    by_stem_[word].insert(category);
  } else {
    entries.exact.insert(word);
    by_word_[word].insert(category);
  }
}

std::set<std::string> CategoryLexicon::lookup(std::string_view lemma) const {
  std::set<std::string> out;
  if (auto it = by_word_.find(lemma); it != by_word_.end()) out = it->second;
  if (by_stem_.empty()) return out;
  for (std::size_t len = 1; len <= lemma.size(); ++len) {
    if (auto it = by_stem_.find(lemma.substr(0, len)); it != by_stem_.end()) {
      out.insert(it->second.begin(), it->second.end());
    }
  }
  return out;
}

std::set<std::string> lookup_categories(const CategoryLexicon& lex, std::string_view lemma) {
  return lex.lookup(lemma);
}

CategoryLexicon parse_liwc(std::istream& dic) {
  CategoryLexicon lex(LexiconSource::liwc);
  std::map<long, std::string> names;
  std::set<std::string> seen_names;
  int delimiters = 0;

  for_each_line(dic, [&](std::string_view line, std::size_t lineno) {
    const auto t = text::trim(line);
    if (t.empty()) return;
    if (t == "%") {
      ++delimiters;
      if (delimiters > 2) throw MalformedResource(lineno, "unexpected third '%' delimiter");
      return;
    }
    if (delimiters == 0) throw MalformedResource(lineno, "missing opening '%' delimiter");
    if (delimiters == 1) {
      const auto tokens = text::split_ws(t);
      const auto id = text::parse_int<long>(tokens[0]);
      if (!id || tokens.size() < 2) throw MalformedResource(lineno, "category line must be '<id> <name>'");
      const std::string name(tokens[1]);
      if (!names.emplace(*id, name).second) throw MalformedResource(lineno, "duplicate category id " + std::to_string(*id));
      if (!seen_names.insert(name).second) throw MalformedResource(lineno, "duplicate category name '" + name + "'");
      return;
    }
    const std::size_t tab = t.find('\t');
    std::string_view word;
    std::string_view rest;
    if (tab != std::string_view::npos) {
      word = t.substr(0, tab);
      rest = t.substr(tab + 1);
    } else {
      const auto tokens = text::split_ws(t);
      word = tokens[0];
      rest = t.substr(tokens[0].size());
    }
    const auto ids = text::split_ws(rest);
    if (ids.empty()) throw MalformedResource(lineno, "word '" + std::string(word) + "' has no categories");
    for (std::string_view id_text : ids) {
      const auto id = text::parse_int<long>(id_text);
      if (!id) throw MalformedResource(lineno, "non-numeric category id '" + std::string(id_text) + "'");
      const auto it = names.find(*id);
      if (it == names.end()) throw MalformedResource(lineno, "unknown category id " + std::to_string(*id));
      lex.add(it->second, word, lineno);
    }
  });
  if (delimiters < 2) throw MalformedResource(0, "missing '%' delimiter");
  return lex;
}

CategoryLexicon parse_levin(std::istream& tsv) {
  CategoryLexicon lex(LexiconSource::levin);
  std::map<std::string, std::string, std::less<>> id_to_name;
  for_each_line(tsv, [&](std::string_view line, std::size_t lineno) {
    if (skippable(line)) return;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 3) {
      throw MalformedResource(lineno, "expected 3 tab-separated columns, found " + std::to_string(fields.size()));
    }
    const std::string id(text::trim(fields[0]));
    const std::string name(text::trim(fields[1]));
    if (id.empty() || name.empty()) throw MalformedResource(lineno, "empty class id or name");
    const auto [it, inserted] = id_to_name.emplace(id, name);
    if (!inserted && it->second != name) {
      throw MalformedResource(lineno, "class " + id + " named both '" + it->second + "' and '" + name + "'");
    }
    lex.add(name, fields[2], lineno);
  });
  return lex;
}

CategoryLexicon parse_inquirer(std::istream& tsv) {
  CategoryLexicon lex(LexiconSource::inquirer);
  for_each_line(tsv, [&](std::string_view line, std::size_t lineno) {
    if (skippable(line)) return;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2) {
      throw MalformedResource(lineno, "expected 2 tab-separated columns, found " + std::to_string(fields.size()));
    }
    std::string_view entry = text::trim(fields[0]);
    if (const auto hash = entry.find('#'); hash != std::string_view::npos) entry = entry.substr(0, hash);
    for (std::string_view cat : text::split(fields[1], ',')) {
      cat = text::trim(cat);
      if (!cat.empty()) lex.add(std::string(cat), entry, lineno);
    }
  });
  return lex;
}

std::optional<double> NumericLexicon::lookup(std::string_view lemma) const {
  const auto it = values_.find(lemma);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> lookup_numeric(const NumericLexicon& lex, std::string_view lemma) { return lex.lookup(lemma); }

NumericLexicon parse_numeric_lexicon(std::istream& tsv, NumericKind kind) {
  NumericLexicon lex(kind);
  for_each_line(tsv, [&](std::string_view line, std::size_t lineno) {
    if (skippable(line)) return;
    const auto fields = text::split(line, '\t');
    if (fields.size() != 2) {
      throw MalformedResource(lineno, "expected 2 tab-separated columns, found " + std::to_string(fields.size()));
    }
    std::string word = text::lowercase(text::trim(fields[0]));
    if (word.empty()) throw MalformedResource(lineno, "empty word");
    const auto value = text::parse_double(text::trim(fields[1]));
    if (!value || !std::isfinite(*value)) {
      throw MalformedResource(lineno, "non-numeric value '" + std::string(fields[1]) + "'");
    }
    if (kind == NumericKind::concreteness) {
      if (*value < 1.0 || *value > 5.0) {
        throw MalformedResource(lineno, "concreteness " + std::string(text::trim(fields[1])) + " outside [1, 5]");
      }
      if (!lex.values_.emplace(std::move(word), *value).second) {
        throw MalformedResource(lineno, "duplicate concreteness entry");
      }
    } else {
      if (*value < 0.0) throw MalformedResource(lineno, "negative frequency");
      lex.values_[word] += *value;
    }
  });
  return lex;
}

// ---------------------------------------------------------------------------

ResourcePaths ResourcePaths::in_directory(const std::filesystem::path& dir) {
  ResourcePaths p;
  p.data_noun = dir / "data.noun";
  p.data_verb = dir / "data.verb";
  p.index_noun = dir / "index.noun";
  p.index_verb = dir / "index.verb";
  p.liwc = dir / "liwc.dic";
  p.levin = dir / "levin.tsv";
  p.inquirer = dir / "inquirer.tsv";
  p.concreteness = dir / "concreteness.tsv";
  p.frequency = dir / "frequency.tsv";
  return p;
}

std::vector<std::pair<std::string, std::filesystem::path>> ResourcePaths::entries() const {
  return {{"data.noun", data_noun},       {"data.verb", data_verb}, {"index.noun", index_noun},
          {"index.verb", index_verb},     {"liwc", liwc},           {"levin", levin},
          {"inquirer", inquirer},         {"concreteness", concreteness}, {"frequency", frequency}};
}

namespace {

std::ifstream open_resource(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) throw ResourceNotFound(path.string());
  return in;
}

template <typename Parse>
auto parse_file(const std::filesystem::path& path, Parse&& parse) {
  auto in = open_resource(path);
  try {
    return parse(in);
  } catch (const Error& e) {
    throw ResourceFileError(path.string(), e.what());
  }
}

}  // namespace

Resources load_resources(const ResourcePaths& paths) {
  // Open everything first so a missing file is reported before any parsing.
  for (const auto& [role, path] : paths.entries()) open_resource(path);

  Resources r;
  {
    auto dn = open_resource(paths.data_noun);
    auto dv = open_resource(paths.data_verb);
    auto in = open_resource(paths.index_noun);
    auto iv = open_resource(paths.index_verb);
    try {
      r.wordnet = parse_wordnet(dn, dv, in, iv);
    } catch (const Error& e) {
      throw ResourceFileError(paths.data_noun.parent_path().string(), e.what());
    }
  }
  r.liwc = parse_file(paths.liwc, [](std::istream& s) { return parse_liwc(s); });
  r.levin = parse_file(paths.levin, [](std::istream& s) { return parse_levin(s); });
  r.inquirer = parse_file(paths.inquirer, [](std::istream& s) { return parse_inquirer(s); });
  r.concreteness = parse_file(paths.concreteness,
                              [](std::istream& s) { return parse_numeric_lexicon(s, NumericKind::concreteness); });
  r.frequency =
      parse_file(paths.frequency, [](std::istream& s) { return parse_numeric_lexicon(s, NumericKind::frequency); });
  return r;
}

}  // namespace vlmprobe::lexres
