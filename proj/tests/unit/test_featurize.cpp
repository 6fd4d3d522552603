#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "support.hpp"
#include "vlmprobe/error.hpp"
#include "vlmprobe/featurize.hpp"

using namespace vlmprobe;
using featurize::FeatureColumn;
using featurize::Family;
using featurize::Kind;
using featurize::Role;
using ingest::Slot;
using testing::make_instance;

namespace {

std::vector<ingest::WordRoles> roles_of(const std::vector<ingest::BenchmarkInstance>& instances) {
  std::vector<ingest::WordRoles> out;
  for (const auto& inst : instances) out.push_back(ingest::derive_roles(inst));
  return out;
}

const FeatureColumn* find(const std::vector<FeatureColumn>& cols, std::string_view name) {
  for (const auto& c : cols) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::vector<ingest::BenchmarkInstance> fixture_instances() {
  std::ifstream in(testing::data_dir() / "fixture" / "scores.jsonl");
  return ingest::read_scores(in).instances;
}

FeatureColumn numeric(std::vector<double> v) {
  FeatureColumn c;
  c.name = "conc@in_common";
  c.family = Family::conc;
  c.kind = Kind::numeric;
  c.values = v;
  c.raw = v;
  for (double x : v) c.support += std::isnan(x) ? 0 : 1;
  return c;
}

// Bases a word switches on, recomputed straight from the resources.
std::set<std::string> naive_bases(Family family, const ingest::SlotWord& w, const lexres::Resources& res) {
  std::set<std::string> out;
  auto add_all = [&](const std::set<std::string>& cats) {
    for (const auto& c : cats) out.insert(featurize::sanitize(c));
  };
  switch (family) {
    case Family::levin:
      if (w.slot == Slot::verb) add_all(lexres::lookup_categories(res.levin, w.lemma));
      break;
    case Family::liwc: add_all(lexres::lookup_categories(res.liwc, w.lemma)); break;
    case Family::gi: add_all(lexres::lookup_categories(res.inquirer, w.lemma)); break;
    case Family::hyper: {
      const auto pos = w.slot == Slot::verb ? lexres::PartOfSpeech::verb : lexres::PartOfSpeech::noun;
      if (const auto* s = lexres::most_common_synset(res.wordnet, w.lemma, pos)) {
        out = lexres::hypernym_closure(res.wordnet, *s);
      }
      break;
    }
    case Family::word: out.insert(w.lemma); break;
    default: break;
  }
  return out;
}

}  // namespace

TEST_CASE("original word wash fires its word and levin columns") {
  std::vector<ingest::BenchmarkInstance> inst{
      make_instance("a", {"man", "wash", "car"}, Slot::verb, "ride", 0.3, 0.2),
      make_instance("b", {"man", "ride", "car"}, Slot::verb, "wash", 0.3, 0.2),
      make_instance("c", {"girl", "ride", "bicycle"}, Slot::subject, "boy", 0.3, 0.2),
      make_instance("d", {"girl", "sit", "sofa"}, Slot::subject, "boy", 0.3, 0.2),
  };
  const auto cols = featurize::build_binary_features(inst, roles_of(inst), testing::fixture_resources(), 1);
  const auto* word = find(cols, "word:wash@original");
  REQUIRE(word != nullptr);
  CHECK(word->bits == std::vector<std::uint8_t>{1, 0, 0, 0});
  const auto* levin = find(cols, "levin:floss_verbs@original");
  REQUIRE(levin != nullptr);
  CHECK(levin->bits == std::vector<std::uint8_t>{1, 0, 0, 0});
  CHECK(levin->triggers == std::vector<std::pair<std::string, std::size_t>>{{"wash", 1}});
  CHECK(find(cols, "levin:floss_verbs@replacement") != nullptr);

  const auto* sofa = find(cols, "word:sofa@in_common");
  REQUIRE(sofa != nullptr);
  CHECK(sofa->bits == std::vector<std::uint8_t>{0, 0, 0, 1});
  CHECK(find(cols, "levin:ride_verbs@in_common") != nullptr);
  const auto* furniture = find(cols, "hyper:furniture.n.01@in_common");
  REQUIRE(furniture != nullptr);
  CHECK(furniture->bits == std::vector<std::uint8_t>{0, 0, 0, 1});

  // Every instance has an in-common entity descendant, so the column never varies.
  CHECK(find(cols, "hyper:entity.n.01@in_common") == nullptr);
}

TEST_CASE("in-common columns fire when either word triggers") {
  std::vector<ingest::BenchmarkInstance> inst{
      make_instance("a", {"mother", "hug", "dog"}, Slot::object, "cat", 0.3, 0.2),
      make_instance("b", {"dog", "run", "beach"}, Slot::subject, "cat", 0.3, 0.2),
      make_instance("c", {"horse", "hug", "grass"}, Slot::object, "ball", 0.3, 0.2),
  };
  const auto cols = featurize::build_binary_features(inst, roles_of(inst), testing::fixture_resources(), 1);
  const auto* social = find(cols, "liwc:social@in_common");
  REQUIRE(social != nullptr);
  CHECK(social->bits == std::vector<std::uint8_t>{1, 0, 1});
  CHECK(social->support == 2);
}

TEST_CASE("numeric columns") {
  std::vector<ingest::BenchmarkInstance> inst{
      make_instance("a", {"girl", "sit", "grass"}, Slot::subject, "dog", 0.3, 0.2),
      make_instance("b", {"dog", "hold", "house"}, Slot::verb, "hug", 0.3, 0.2),
      make_instance("c", {"zzzz", "yyyy", "ball"}, Slot::object, "cake", 0.3, 0.2),
  };
  inst[0].sentence = "a girl sits on the grass";
  inst[1].sim_word = 0.4;
  const auto cols =
      featurize::build_numeric_features(inst, roles_of(inst), testing::fixture_resources(),
                                        featurize::FrequencyTransform::raw);
  const auto* len = find(cols, "len:sentence");
  REQUIRE(len != nullptr);
  CHECK(len->raw[0] == 6.0);

  const auto* conc = find(cols, "conc@in_common");
  REQUIRE(conc != nullptr);
  CHECK(conc->raw[0] == doctest::Approx((4.07 + 4.93) / 2).epsilon(1e-12));
  CHECK(conc->raw[1] == doctest::Approx((4.85 + 4.96) / 2).epsilon(1e-12));

  const auto* ambig = find(cols, "ambig@in_common");
  REQUIRE(ambig != nullptr);
  CHECK(ambig->raw[1] == 2.5);  // dog has 3 senses, house 2
  CHECK(std::isnan(ambig->raw[2]));  // neither in-common word is indexed

  const auto* sim = find(cols, "sim:word");
  REQUIRE(sim != nullptr);
  CHECK(std::isnan(sim->raw[0]));
  CHECK(sim->raw[1] == 0.4);
  CHECK(sim->support == 1);

  const auto& freq_lex = testing::fixture_resources().frequency;
  const auto* freq = find(cols, "freq@original");
  REQUIRE(freq != nullptr);
  CHECK(freq->raw[0] == *lexres::lookup_numeric(freq_lex, "girl"));

  const auto logged = featurize::build_numeric_features(inst, roles_of(inst), testing::fixture_resources(),
                                                        featurize::FrequencyTransform::log10p1);
  CHECK(find(logged, "freq@original")->raw[0] ==
        doctest::Approx(std::log10(1.0 + *lexres::lookup_numeric(freq_lex, "girl"))).epsilon(1e-12));
}

TEST_CASE("standardize") {
  const auto fixed = featurize::standardize(numeric({-1, 0, 1}));
  CHECK(fixed.values == std::vector<double>{-1, 0, 1});

  const auto z = featurize::standardize(numeric({1, 2, 3, 4}));
  CHECK(z.values[0] == doctest::Approx(-1.161895003862225).epsilon(1e-12));
  CHECK(z.values[1] == doctest::Approx(-0.3872983346207417).epsilon(1e-12));
  CHECK(z.values[2] == doctest::Approx(0.3872983346207417).epsilon(1e-12));
  CHECK(z.values[3] == doctest::Approx(1.161895003862225).epsilon(1e-12));
  CHECK(z.raw == std::vector<double>{1, 2, 3, 4});

  CHECK_THROWS_AS(featurize::standardize(numeric({2, 2, 2})), DegenerateColumn);
  CHECK_THROWS_AS(featurize::standardize(numeric({2, featurize::kMissing})), DegenerateColumn);

  const auto with_gap = featurize::standardize(numeric({1, featurize::kMissing, 3}));
  CHECK(std::isnan(with_gap.values[1]));
  CHECK(with_gap.values[0] == doctest::Approx(-0.7071067811865476).epsilon(1e-12));

  const auto twice = featurize::standardize(z);
  for (std::size_t i = 0; i < z.values.size(); ++i) CHECK(std::abs(twice.values[i] - z.values[i]) <= 1e-9);
}

TEST_CASE("fixture matrix invariants") {
  const auto instances = fixture_instances();
  const auto& res = testing::fixture_resources();
  featurize::FeatureOptions opts;
  const auto m = featurize::build_feature_matrix(instances, res, opts);
  REQUIRE(m.instance_ids.size() == instances.size());
  CHECK(m.instance_ids.front() == "fx000");

  std::set<std::string> names;
  for (const auto& c : m.columns) {
    CHECK(names.insert(c.name).second);
    REQUIRE(c.size() == instances.size());
    if (c.kind == Kind::binary) {
      std::size_t ones = 0;
      for (auto b : c.bits) {
        CHECK(b <= 1);
        ones += b;
      }
      CHECK(ones == c.support);
      CHECK(c.support >= opts.min_support);
      CHECK(c.support <= instances.size() - opts.min_support);
    } else {
      double sum = 0, sq = 0;
      std::size_t n = 0;
      for (double v : c.values) {
        if (std::isnan(v)) continue;
        sum += v;
        ++n;
      }
      const double mean = sum / static_cast<double>(n);
      for (double v : c.values) {
        if (!std::isnan(v)) sq += (v - mean) * (v - mean);
      }
      CHECK(std::abs(mean) <= 1e-9);
      CHECK(std::abs(std::sqrt(sq / static_cast<double>(n - 1)) - 1.0) <= 1e-9);
      CHECK(n == c.support);
    }
  }
  for (std::size_t i = 1; i < m.columns.size(); ++i) {
    const auto& a = m.columns[i - 1];
    const auto& b = m.columns[i];
    CHECK(std::tie(a.family, a.base, a.role) < std::tie(b.family, b.base, b.role));
  }
  CHECK(m.find("hyper:furniture.n.01@in_common") != nullptr);
  CHECK(m.find("len:sentence") != nullptr);
}

TEST_CASE("binary support matches a naive rescan") {
  const auto instances = fixture_instances();
  const auto& res = testing::fixture_resources();
  const auto roles = roles_of(instances);
  const auto cols = featurize::build_binary_features(instances, roles, res, 1);
  REQUIRE(!cols.empty());
  for (const auto& c : cols) {
    for (std::size_t i = 0; i < instances.size(); ++i) {
      std::vector<ingest::SlotWord> words;
      switch (c.role) {
        case Role::in_common: words = {roles[i].in_common[0], roles[i].in_common[1]}; break;
        case Role::original: words = {roles[i].original}; break;
        case Role::replacement: words = {roles[i].replacement}; break;
        case Role::sentence: break;
      }
      bool fires = false;
      for (const auto& w : words) fires = fires || naive_bases(c.family, w, res).count(c.base) > 0;
      CHECK_MESSAGE(c.bits[i] == (fires ? 1 : 0), c.name << " row " << i);
    }
  }
}

TEST_CASE("support filtering commutes with construction") {
  const auto instances = fixture_instances();
  const auto roles = roles_of(instances);
  const auto& res = testing::fixture_resources();
  const auto all = featurize::build_binary_features(instances, roles, res, 1);
  const auto filtered = featurize::build_binary_features(instances, roles, res, 10);
  std::set<std::string> expected, got;
  for (const auto& c : all) {
    if (c.support >= 10 && c.support <= instances.size() - 10) expected.insert(c.name);
  }
  for (const auto& c : filtered) got.insert(c.name);
  CHECK(expected == got);
}

TEST_CASE("matrix is independent of the worker count") {
  const auto instances = fixture_instances();
  featurize::FeatureOptions one;
  featurize::FeatureOptions many;
  many.jobs = 6;
  std::ostringstream a, b;
  featurize::write_matrix_csv(a, featurize::build_feature_matrix(instances, testing::fixture_resources(), one));
  featurize::write_matrix_csv(b, featurize::build_feature_matrix(instances, testing::fixture_resources(), many));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("id,", 0) == 0);
}

TEST_CASE("degenerate numeric columns are dropped with a warning") {
  std::vector<ingest::BenchmarkInstance> inst;
  for (int i = 0; i < 4; ++i) {
    inst.push_back(make_instance("i" + std::to_string(i), {"girl", "sit", "grass"}, Slot::subject, "dog", 0.3, 0.2));
  }
  featurize::FeatureOptions opts;
  opts.min_support = 1;
  const auto m = featurize::build_feature_matrix(inst, testing::fixture_resources(), opts);
  CHECK(m.find("len:sentence") == nullptr);
  CHECK_FALSE(m.warnings.empty());
}

TEST_CASE("sanitize") {
  CHECK(featurize::sanitize("Floss Verbs") == "floss_verbs");
  CHECK(featurize::sanitize("  assuming a\tposition ") == "assuming_a_position");
}
