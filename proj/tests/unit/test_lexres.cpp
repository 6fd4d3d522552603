#include <doctest.h>

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "vlmprobe/error.hpp"
#include "vlmprobe/lexres.hpp"

using namespace vlmprobe;
using lexres::PartOfSpeech;
using Names = std::set<std::string>;

namespace {

const lexres::WordNetDb& db() { return testing::fixture_resources().wordnet; }

const lexres::Synset& first_sense(const char* lemma, PartOfSpeech pos = PartOfSpeech::noun) {
  const lexres::Synset* s = lexres::most_common_synset(db(), lemma, pos);
  REQUIRE(s != nullptr);
  return *s;
}

lexres::WordNetDb parse_strings(const std::string& dn, const std::string& dv = "", const std::string& in = "",
                                const std::string& iv = "") {
  std::istringstream a(dn), b(dv), c(in), d(iv);
  return lexres::parse_wordnet(a, b, c, d);
}

// Offsets of every synset line, read straight from the data file.
std::vector<std::uint32_t> data_offsets(const char* file) {
  std::ifstream in(testing::resource_dir() / file);
  std::vector<std::uint32_t> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("  ", 0) == 0 || line.empty()) continue;
    out.push_back(static_cast<std::uint32_t>(std::stoul(line.substr(0, 8))));
  }
  return out;
}

}  // namespace

TEST_CASE("fixture database shape") {
  CHECK(db().version() == "3.0");
  CHECK(db().size() == 59 + 25);
  CHECK(db().index_size(PartOfSpeech::noun) > 0);
  CHECK(db().index_size(PartOfSpeech::verb) > 0);
}

TEST_CASE("dog resolves to the canine sense with a four-link chain to entity") {
  const auto& dog = first_sense("dog");
  CHECK(dog.name == "dog.n.01");
  CHECK(dog.offset == 1364);
  CHECK(dog.lemmas == std::vector<std::string>{"dog", "domestic_dog", "canis_familiaris"});

  std::vector<std::string> chain;
  const lexres::Synset* s = &dog;
  while (!s->hypernyms.empty()) {
    REQUIRE(s->hypernyms.size() == 1);
    s = db().find(s->hypernyms.front());
    REQUIRE(s != nullptr);
    chain.push_back(s->name);
  }
  CHECK(chain == std::vector<std::string>{"canine.n.01", "carnivore.n.01", "animal.n.01", "entity.n.01"});
  CHECK(lexres::hypernym_closure(db(), dog) == Names{"canine.n.01", "carnivore.n.01", "animal.n.01", "entity.n.01"});
}

TEST_CASE("root synset has an empty closure") {
  CHECK(lexres::hypernym_closure(db(), first_sense("entity")).empty());
}

TEST_CASE("house and school sit under building") {
  CHECK(lexres::hypernym_closure(db(), first_sense("house")).count("building.n.01") == 1);
  CHECK(lexres::hypernym_closure(db(), first_sense("school")).count("building.n.01") == 1);
  // Hyponym pointers on building are ignored.
  CHECK(first_sense("building").hypernyms.size() == 1);
}

TEST_CASE("diamond closure is a union without duplicates") {
  const auto& person = first_sense("person");
  CHECK(person.hypernyms.size() == 2);
  CHECK(lexres::hypernym_closure(db(), person) ==
        Names{"organism.n.01", "causal_agent.n.01", "object.n.01", "physical_entity.n.01", "entity.n.01"});
}

TEST_CASE("sofa reaches furniture") {
  const auto& sofa = first_sense("sofa");
  CHECK(sofa.name == "sofa.n.01");
  CHECK(lexres::hypernym_closure(db(), sofa).count("furniture.n.01") == 1);
  CHECK(first_sense("couch").offset == sofa.offset);
}

TEST_CASE("index order and sense numbering") {
  const auto house = db().senses("house", PartOfSpeech::noun);
  CHECK(std::vector<std::uint32_t>(house.begin(), house.end()) == std::vector<std::uint32_t>{4273, 4605});
  CHECK(first_sense("table").name == "table.n.01");
  CHECK(first_sense("tabular_array").name == "table.n.01");
  const auto table = db().senses("table", PartOfSpeech::noun);
  REQUIRE(table.size() == 2);
  CHECK(db().find({table[1], PartOfSpeech::noun})->name == "table.n.02");
  const auto food = db().senses("food", PartOfSpeech::noun);
  REQUIRE(food.size() == 2);
  CHECK(db().find({food[1], PartOfSpeech::noun})->name == "food.n.02");
  // A synset is named after its first lemma even when listed under others.
  const auto dog = db().senses("dog", PartOfSpeech::noun);
  REQUIRE(dog.size() == 3);
  CHECK(db().find({dog[1], PartOfSpeech::noun})->name == "cad.n.01");
  CHECK(db().find({dog[2], PartOfSpeech::noun})->name == "frank.n.01");
}

TEST_CASE("synset counts") {
  CHECK(lexres::synset_count(db(), "dog", PartOfSpeech::noun) == 3);
  CHECK(lexres::synset_count(db(), "sofa", PartOfSpeech::noun) == 1);
  CHECK(lexres::synset_count(db(), "zzzz", PartOfSpeech::noun) == 0);
  CHECK(lexres::synset_count(db(), "run", PartOfSpeech::verb) == 2);
  CHECK(lexres::synset_count(db(), "run", PartOfSpeech::noun) == 0);
  CHECK(lexres::most_common_synset(db(), "zzzz", PartOfSpeech::noun) == nullptr);
  CHECK(lexres::most_common_synset(db(), "run", PartOfSpeech::noun) == nullptr);
  CHECK(first_sense("run", PartOfSpeech::verb).name == "run.v.01");
}

TEST_CASE("most common synset is the head of the sense list") {
  for (const char* lemma : {"dog", "house", "table", "food", "person", "sofa"}) {
    const auto senses = db().senses(lemma, PartOfSpeech::noun);
    REQUIRE(!senses.empty());
    CHECK(first_sense(lemma).offset == senses.front());
    CHECK(lexres::synset_count(db(), lemma, PartOfSpeech::noun) == senses.size());
  }
}

TEST_CASE("closure is monotone along every hypernym edge") {
  for (const auto& [file, pos] : {std::pair{"data.noun", PartOfSpeech::noun}, std::pair{"data.verb", PartOfSpeech::verb}}) {
    for (std::uint32_t offset : data_offsets(file)) {
      const lexres::Synset* s = db().find({offset, pos});
      REQUIRE(s != nullptr);
      const Names closure = lexres::hypernym_closure(db(), *s);
      CHECK(closure.count(s->name) == 0);
      for (const auto& ref : s->hypernyms) {
        const lexres::Synset* parent = db().find(ref);
        REQUIRE(parent != nullptr);
        CHECK(closure.count(parent->name) == 1);
        for (const auto& name : lexres::hypernym_closure(db(), *parent)) CHECK(closure.count(name) == 1);
      }
    }
  }
}

TEST_CASE("parsing is deterministic") {
  const auto paths = lexres::ResourcePaths::in_directory(testing::resource_dir());
  const auto again = lexres::load_resources(paths);
  for (std::uint32_t offset : data_offsets("data.noun")) {
    const auto* a = db().find({offset, PartOfSpeech::noun});
    const auto* b = again.wordnet.find({offset, PartOfSpeech::noun});
    REQUIRE(b != nullptr);
    CHECK(a->name == b->name);
    CHECK(a->lemmas == b->lemmas);
    CHECK(a->hypernyms == b->hypernyms);
  }
  CHECK(again.liwc.categories().size() == testing::fixture_resources().liwc.categories().size());
}

TEST_CASE("wordnet parse errors") {
  SUBCASE("non-numeric offset") {
    CHECK_THROWS_AS(parse_strings("0000x100 05 n 01 cat 0 000 | gloss\n"), MalformedResource);
  }
  SUBCASE("pointer count disagrees with fields") {
    CHECK_THROWS_AS(parse_strings("00000100 05 n 01 cat 0 002 @ 00000200 n 0000 | gloss\n"), MalformedResource);
  }
  SUBCASE("dangling hypernym") {
    CHECK_THROWS_AS(parse_strings("00000100 05 n 01 cat 0 001 @ 00000200 n 0000 | gloss\n"), DanglingReference);
  }
  SUBCASE("dangling index offset") {
    CHECK_THROWS_AS(parse_strings("00000100 05 n 01 cat 0 000 | gloss\n", "", "cat n 1 0 1 0 00000999\n"),
                    DanglingReference);
  }
  SUBCASE("index field count") {
    CHECK_THROWS_AS(parse_strings("00000100 05 n 01 cat 0 000 | gloss\n", "", "cat n 2 0 1 0 00000100\n"),
                    MalformedResource);
  }
  SUBCASE("header lines are skipped and the version captured") {
    const auto parsed = parse_strings("  1 WordNet 2.1 header\n00000100 05 n 01 cat 0 000 | gloss\n", "",
                                      "  1 header\ncat n 1 0 1 0 00000100\n");
    CHECK(parsed.version() == "2.1");
    CHECK(parsed.size() == 1);
    CHECK(lexres::most_common_synset(parsed, "cat", PartOfSpeech::noun)->name == "cat.n.01");
  }
  SUBCASE("unindexed synset falls back to sense 01") {
    const auto parsed = parse_strings("00000100 05 n 01 cat 0 000 | gloss\n");
    CHECK(parsed.find({100, PartOfSpeech::noun})->name == "cat.n.01");
  }
  SUBCASE("instance hypernyms count, other pointers do not") {
    const auto parsed = parse_strings(
        "00000100 05 n 01 thing 0 000 | a\n"
        "00000200 05 n 01 paris 0 002 @i 00000100 n 0000 %p 00000100 n 0000 | b\n");
    CHECK(parsed.find({200, PartOfSpeech::noun})->hypernyms.size() == 1);
  }
}

TEST_CASE("cycles are reported") {
  const auto parsed = parse_strings(
      "00000100 05 n 01 alpha 0 001 @ 00000200 n 0000 | a\n"
      "00000200 05 n 01 beta 0 001 @ 00000100 n 0000 | b\n");
  CHECK_THROWS_AS(lexres::hypernym_closure(parsed, *parsed.find({100, PartOfSpeech::noun})), CycleDetected);
}

TEST_CASE("liwc golden entries") {
  const auto& liwc = testing::fixture_resources().liwc;
  CHECK(lexres::lookup_categories(liwc, "mother") == Names{"female", "family", "social"});
  CHECK(lexres::lookup_categories(liwc, "happiness") == Names{"posemo"});
  CHECK(lexres::lookup_categories(liwc, "happily") == Names{"posemo"});
  CHECK(lexres::lookup_categories(liwc, "happen").empty());
  CHECK(lexres::lookup_categories(liwc, "zzzz").empty());
  CHECK(lexres::lookup_categories(liwc, "family") == Names{"family", "social"});
  CHECK(lexres::lookup_categories(liwc, "ride") == Names{"leisure", "motion"});
}

TEST_CASE("all matching stems contribute") {
  std::istringstream dic("%\n1\tshort\n2\tlong\n%\nhap*\t1\nhappi*\t2\n");
  const auto lex = lexres::parse_liwc(dic);
  CHECK(lexres::lookup_categories(lex, "happiness") == Names{"short", "long"});
  CHECK(lexres::lookup_categories(lex, "happen") == Names{"short"});
}

TEST_CASE("liwc parse errors") {
  std::istringstream no_delims("1\tsocial\nmother\t1\n");
  CHECK_THROWS_AS(lexres::parse_liwc(no_delims), MalformedResource);
  std::istringstream unknown_id("%\n1\tsocial\n%\nmother\t7\n");
  CHECK_THROWS_AS(lexres::parse_liwc(unknown_id), MalformedResource);
  std::istringstream inner_star("%\n1\tsocial\n%\nmo*ther\t1\n");
  CHECK_THROWS_AS(lexres::parse_liwc(inner_star), MalformedResource);
}

TEST_CASE("levin golden entries") {
  const auto& levin = testing::fixture_resources().levin;
  CHECK(lexres::lookup_categories(levin, "wash").count("floss verbs") == 1);
  for (const char* verb : {"cover", "encircle", "touch"}) {
    CHECK(lexres::lookup_categories(levin, verb) == Names{"hug verbs"});
  }
  CHECK(levin.categories().at("hug verbs").exact == Names{"hug", "cover", "encircle", "touch"});
  CHECK(lexres::lookup_categories(levin, "zzzz").empty());
}

TEST_CASE("levin parse errors") {
  std::istringstream two_cols("36.1\thug verbs\n");
  CHECK_THROWS_AS(lexres::parse_levin(two_cols), MalformedResource);
  std::istringstream renamed("36.1\thug verbs\thug\n36.1\tembrace verbs\tcuddle\n");
  CHECK_THROWS_AS(lexres::parse_levin(renamed), MalformedResource);
  std::istringstream stem("36.1\thug verbs\thug*\n");
  CHECK_THROWS_AS(lexres::parse_levin(stem), MalformedResource);
}

TEST_CASE("inquirer golden entries") {
  const auto& gi = testing::fixture_resources().inquirer;
  CHECK(lexres::lookup_categories(gi, "student").count("academia") == 1);
  CHECK(lexres::lookup_categories(gi, "about") == Names{"space", "undrst", "quan"});
  CHECK(lexres::lookup_categories(gi, "house") == Names{"bldgpt", "place", "social"});
  CHECK(lexres::lookup_categories(gi, "zzzz").empty());
}

TEST_CASE("every listed entry round-trips through lookup") {
  const auto& res = testing::fixture_resources();
  for (const lexres::CategoryLexicon* lex : {&res.liwc, &res.levin, &res.inquirer}) {
    for (const auto& [category, entries] : lex->categories()) {
      for (const auto& word : entries.exact) CHECK(lexres::lookup_categories(*lex, word).count(category) == 1);
      for (const auto& stem : entries.stems) {
        CHECK(lexres::lookup_categories(*lex, stem + "xyz").count(category) == 1);
      }
    }
  }
}

TEST_CASE("numeric lexicons") {
  const auto& res = testing::fixture_resources();
  CHECK(lexres::lookup_numeric(res.concreteness, "table") == 4.9);
  CHECK_FALSE(lexres::lookup_numeric(res.concreteness, "zzzz").has_value());

  // Independent count over the fixture corpus.
  std::map<std::string, double> counts;
  std::string word;
  for (char c : testing::slurp(testing::resource_dir() / "corpus.txt")) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!word.empty()) {
      ++counts[word];
      word.clear();
    }
  }
  REQUIRE(counts.count("the") == 1);
  CHECK(lexres::lookup_numeric(res.frequency, "the") == counts["the"]);
  CHECK(lexres::lookup_numeric(res.frequency, "dog") == counts["dog"]);
  CHECK_FALSE(lexres::lookup_numeric(res.frequency, "zzzz").has_value());
}

TEST_CASE("numeric lexicon errors and merging") {
  std::istringstream too_high("table\t5.2\n");
  CHECK_THROWS_AS(lexres::parse_numeric_lexicon(too_high, lexres::NumericKind::concreteness), MalformedResource);
  std::istringstream too_low("table\t0.5\n");
  CHECK_THROWS_AS(lexres::parse_numeric_lexicon(too_low, lexres::NumericKind::concreteness), MalformedResource);
  std::istringstream dup("table\t4.1\ntable\t4.2\n");
  CHECK_THROWS_AS(lexres::parse_numeric_lexicon(dup, lexres::NumericKind::concreteness), MalformedResource);
  std::istringstream text("table\tfour\n");
  CHECK_THROWS_AS(lexres::parse_numeric_lexicon(text, lexres::NumericKind::concreteness), MalformedResource);
  std::istringstream negative("the\t-3\n");
  CHECK_THROWS_AS(lexres::parse_numeric_lexicon(negative, lexres::NumericKind::frequency), MalformedResource);
  std::istringstream summed("The\t3\nthe\t4\n# comment\n\n");
  const auto freq = lexres::parse_numeric_lexicon(summed, lexres::NumericKind::frequency);
  CHECK(lexres::lookup_numeric(freq, "the") == 7.0);
}

TEST_CASE("resource loading names the failing file") {
  testing::TempDir tmp("lexres");
  for (const auto& entry : std::filesystem::directory_iterator(testing::resource_dir())) {
    std::filesystem::copy_file(entry.path(), tmp.path() / entry.path().filename());
  }
  auto paths = lexres::ResourcePaths::in_directory(tmp.path());
  CHECK_NOTHROW(lexres::load_resources(paths));

  std::filesystem::remove(tmp.path() / "index.noun");
  try {
    lexres::load_resources(paths);
    FAIL("expected ResourceNotFound");
  } catch (const ResourceNotFound& e) {
    CHECK(std::string(e.what()).find("index.noun") != std::string::npos);
  }

  std::filesystem::copy_file(testing::resource_dir() / "index.noun", tmp.path() / "index.noun");
  {
    std::ofstream bad(tmp.path() / "concreteness.tsv", std::ios::app);
    bad << "lamp\t7.5\n";
  }
  try {
    lexres::load_resources(paths);
    FAIL("expected ResourceFileError");
  } catch (const ResourceFileError& e) {
    CHECK(std::string(e.what()).find("concreteness.tsv") != std::string::npos);
  }
}
