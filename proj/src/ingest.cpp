#include "vlmprobe/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "text.hpp"
#include "vlmprobe/error.hpp"

namespace vlmprobe::ingest {
namespace {

using nlohmann::json;

const std::set<std::string, std::less<>> kKnownKeys = {
    "id",         "sentence", "pos_triplet",  "neg_triplet",     "neg_type",     "score_pos",
    "score_neg",  "sim_sentence", "sim_word", "emb_original", "emb_replacement", "emb_sentence",
    "emb_neg_sentence"};

const json& require(const json& obj, const char* field, std::size_t line) {
  const auto it = obj.find(field);
  if (it == obj.end()) throw SchemaError(line, field, "missing");
  return *it;
}

std::string require_string(const json& obj, const char* field, std::size_t line) {
  const json& v = require(obj, field, line);
  if (!v.is_string()) throw SchemaError(line, field, "expected a string");
  return v.get<std::string>();
}

double unit_interval(const json& v, const char* field, std::size_t line) {
  if (!v.is_number()) throw SchemaError(line, field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x) || x < -1.0 || x > 1.0) throw SchemaError(line, field, "value outside [-1, 1]");
  return x;
}

Triplet read_triplet(const json& obj, const char* field, std::size_t line) {
  const json& v = require(obj, field, line);
  if (!v.is_array() || v.size() != 3) throw SchemaError(line, field, "expected an array of 3 strings");
  std::array<std::string, 3> parts;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_string()) throw SchemaError(line, field, "expected an array of 3 strings");
    parts[i] = text::lowercase(text::trim(v[i].get<std::string>()));
    if (parts[i].empty()) throw SchemaError(line, field, "empty triplet element");
  }
  return {parts[0], parts[1], parts[2]};
}

std::vector<double> read_vector(const json& obj, const char* field, std::size_t line) {
  const auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_array() || it->empty()) throw SchemaError(line, field, "expected a non-empty array of numbers");
  std::vector<double> out;
  out.reserve(it->size());
  for (const json& x : *it) {
    if (!x.is_number()) throw SchemaError(line, field, "expected a non-empty array of numbers");
    out.push_back(x.get<double>());
  }
  if (std::all_of(out.begin(), out.end(), [](double x) { return x == 0.0; })) {
    throw SchemaError(line, field, "all-zero embedding");
  }
  return out;
}

std::optional<double> read_optional_score(const json& obj, const char* field, std::size_t line) {
  const auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return unit_interval(*it, field, line);
}

Slot read_slot(const json& obj, std::size_t line) {
  const std::string code = require_string(obj, "neg_type", line);
  if (code == "s") return Slot::subject;
  if (code == "v") return Slot::verb;
  if (code == "o") return Slot::object;
  throw SchemaError(line, "neg_type", "expected one of \"s\", \"v\", \"o\"");
}

char slot_code(Slot slot) {
  switch (slot) {
    case Slot::subject: return 's';
    case Slot::verb: return 'v';
    case Slot::object: return 'o';
  }
  return 's';
}

// Parses one non-blank line. Unknown keys are tallied into `unknown`.
BenchmarkInstance parse_line(std::string_view line_text, std::size_t line, std::size_t& unknown) {
  json obj;
  try {
    obj = json::parse(line_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(line, "<line>", std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw SchemaError(line, "<line>", "expected a JSON object");

  BenchmarkInstance inst;
  inst.id = require_string(obj, "id", line);
  if (inst.id.empty()) throw SchemaError(line, "id", "empty id");
  inst.sentence = require_string(obj, "sentence", line);
  inst.pos_triplet = read_triplet(obj, "pos_triplet", line);
  inst.neg_triplet = read_triplet(obj, "neg_triplet", line);
  inst.neg_type = read_slot(obj, line);
  inst.p = unit_interval(require(obj, "score_pos", line), "score_pos", line);
  inst.n = unit_interval(require(obj, "score_neg", line), "score_neg", line);
  inst.sim_sentence = read_optional_score(obj, "sim_sentence", line);
  inst.sim_word = read_optional_score(obj, "sim_word", line);
  inst.emb_original = read_vector(obj, "emb_original", line);
  inst.emb_replacement = read_vector(obj, "emb_replacement", line);
  inst.emb_sentence = read_vector(obj, "emb_sentence", line);
  inst.emb_neg_sentence = read_vector(obj, "emb_neg_sentence", line);

  std::size_t dim = 0;
  for (const auto* v : {&inst.emb_original, &inst.emb_replacement, &inst.emb_sentence, &inst.emb_neg_sentence}) {
    if (v->empty()) continue;
    if (dim != 0 && v->size() != dim) throw SchemaError(line, "emb_*", "embedding dimensions disagree");
    dim = v->size();
  }

  for (const auto& [key, value] : obj.items()) {
    if (!kKnownKeys.count(key)) ++unknown;
  }

  std::vector<Slot> differing;
  for (Slot s : {Slot::subject, Slot::verb, Slot::object}) {
    if (inst.pos_triplet.at(s) != inst.neg_triplet.at(s)) differing.push_back(s);
  }
  if (differing.size() != 1) {
    throw TripletMismatch(line, "positive and negative triplets differ in " + std::to_string(differing.size()) +
                                    " slots (exactly one required)");
  }
  if (differing.front() != inst.neg_type) {
    throw TripletMismatch(line, "neg_type is '" + std::string(slot_name(inst.neg_type)) +
                                    "' but the triplets differ in the " +
                                    std::string(slot_name(differing.front())) + " slot");
  }
  return inst;
}

template <typename OnLine>
void for_each_record(std::istream& in, OnLine&& on_line) {
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view t = text::trim(raw);
    if (t.empty()) continue;
    on_line(t, line);
  }
}

}  // namespace

std::string_view slot_name(Slot slot) noexcept {
  switch (slot) {
    case Slot::subject: return "subject";
    case Slot::verb: return "verb";
    case Slot::object: return "object";
  }
  return "subject";
}

const std::string& Triplet::at(Slot slot) const noexcept {
  switch (slot) {
    case Slot::subject: return subject;
    case Slot::verb: return verb;
    case Slot::object: return object;
  }
  return subject;
}

Dataset read_scores(std::istream& in) {
  Dataset ds;
  std::map<std::string, std::size_t, std::less<>> first_seen;
  for_each_record(in, [&](std::string_view t, std::size_t line) {
    BenchmarkInstance inst = parse_line(t, line, ds.unknown_keys);
    const auto [it, inserted] = first_seen.emplace(inst.id, line);
    if (!inserted) throw DuplicateId(inst.id, it->second, line);
    ds.instances.push_back(std::move(inst));
  });
  return ds;
}

ValidationReport validate_scores(std::istream& in) {
  ValidationReport report;
  std::map<std::string, std::size_t, std::less<>> first_seen;
  for_each_record(in, [&](std::string_view t, std::size_t line) {
    try {
      BenchmarkInstance inst = parse_line(t, line, report.unknown_keys);
      const auto [it, inserted] = first_seen.emplace(inst.id, line);
      if (!inserted) throw DuplicateId(inst.id, it->second, line);
      ++report.valid;
    } catch (const Error& e) {
      report.issues.push_back({line, e.what()});
    }
  });
  return report;
}

void write_scores(std::ostream& out, std::span<const BenchmarkInstance> instances) {
  for (const BenchmarkInstance& inst : instances) {
    json obj = {{"id", inst.id},
                {"sentence", inst.sentence},
                {"pos_triplet", {inst.pos_triplet.subject, inst.pos_triplet.verb, inst.pos_triplet.object}},
                {"neg_triplet", {inst.neg_triplet.subject, inst.neg_triplet.verb, inst.neg_triplet.object}},
                {"neg_type", std::string(1, slot_code(inst.neg_type))},
                {"score_pos", inst.p},
                {"score_neg", inst.n}};
    if (inst.sim_sentence) obj["sim_sentence"] = *inst.sim_sentence;
    if (inst.sim_word) obj["sim_word"] = *inst.sim_word;
    if (!inst.emb_original.empty()) obj["emb_original"] = inst.emb_original;
    if (!inst.emb_replacement.empty()) obj["emb_replacement"] = inst.emb_replacement;
    if (!inst.emb_sentence.empty()) obj["emb_sentence"] = inst.emb_sentence;
    if (!inst.emb_neg_sentence.empty()) obj["emb_neg_sentence"] = inst.emb_neg_sentence;
    out << obj.dump() << '\n';
  }
  if (!out) throw IoError("failed writing interchange file");
}

WordRoles derive_roles(const BenchmarkInstance& instance) {
  WordRoles roles;
  std::size_t k = 0;
  for (Slot s : {Slot::subject, Slot::verb, Slot::object}) {
    if (s == instance.neg_type) continue;
    roles.in_common[k++] = {instance.pos_triplet.at(s), s};
  }
  roles.original = {instance.pos_triplet.at(instance.neg_type), instance.neg_type};
  roles.replacement = {instance.neg_triplet.at(instance.neg_type), instance.neg_type};
  return roles;
}

double score_d(const BenchmarkInstance& instance) noexcept { return instance.p - instance.n; }

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw DimensionMismatch("cosine of vectors with dimensions " + std::to_string(u.size()) + " and " +
                            std::to_string(v.size()));
  }
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw ZeroVector("cosine of an all-zero vector");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

std::optional<double> sentence_similarity(const BenchmarkInstance& instance) {
  if (instance.sim_sentence) return instance.sim_sentence;
  if (instance.emb_sentence.empty() || instance.emb_neg_sentence.empty()) return std::nullopt;
  return cosine(instance.emb_sentence, instance.emb_neg_sentence);
}

std::optional<double> word_similarity(const BenchmarkInstance& instance) {
  if (instance.sim_word) return instance.sim_word;
  if (instance.emb_original.empty() || instance.emb_replacement.empty()) return std::nullopt;
  return cosine(instance.emb_original, instance.emb_replacement);
}

}  // namespace vlmprobe::ingest
