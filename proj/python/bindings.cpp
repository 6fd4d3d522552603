#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "vlmprobe/analyze.hpp"
#include "vlmprobe/error.hpp"
#include "vlmprobe/featurize.hpp"
#include "vlmprobe/ingest.hpp"
#include "vlmprobe/lexres.hpp"
#include "vlmprobe/stats.hpp"

namespace py = pybind11;
using namespace vlmprobe;
namespace fs = std::filesystem;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

lexres::PartOfSpeech parse_pos(const std::string& pos) {
  if (pos == "n" || pos == "noun") return lexres::PartOfSpeech::noun;
  if (pos == "v" || pos == "verb") return lexres::PartOfSpeech::verb;
  throw py::value_error("pos must be 'n' or 'v'");
}

analyze::Target parse_target(const std::string& t) {
  if (t == "p" || t == "P") return analyze::Target::p;
  if (t == "n" || t == "N") return analyze::Target::n;
  if (t == "d" || t == "D") return analyze::Target::d;
  throw py::value_error("unknown target '" + t + "'");
}

analyze::Correction parse_correction(const std::string& c) {
  if (c == "none") return analyze::Correction::none;
  if (c == "bonferroni") return analyze::Correction::bonferroni;
  if (c == "benjamini_hochberg" || c == "bh") return analyze::Correction::benjamini_hochberg;
  throw py::value_error("unknown correction '" + c + "'");
}

featurize::FrequencyTransform parse_transform(const std::string& t) {
  if (t == "log10p1") return featurize::FrequencyTransform::log10p1;
  if (t == "raw") return featurize::FrequencyTransform::raw;
  throw py::value_error("unknown frequency transform '" + t + "'");
}

const lexres::CategoryLexicon& category_lexicon(const lexres::Resources& r, const std::string& name) {
  if (name == "liwc") return r.liwc;
  if (name == "levin") return r.levin;
  if (name == "gi" || name == "inquirer") return r.inquirer;
  throw py::value_error("unknown lexicon '" + name + "'");
}

py::object optional_value(const std::optional<double>& v) { return v ? py::cast(*v) : py::none(); }

py::list nan_as_none(const std::vector<double>& values) {
  py::list out;
  for (double v : values) out.append(std::isnan(v) ? py::none() : py::cast(v));
  return out;
}

py::dict instance_dict(const ingest::BenchmarkInstance& x) {
  py::dict d;
  d["id"] = x.id;
  d["sentence"] = x.sentence;
  d["pos_triplet"] = py::make_tuple(x.pos_triplet.subject, x.pos_triplet.verb, x.pos_triplet.object);
  d["neg_triplet"] = py::make_tuple(x.neg_triplet.subject, x.neg_triplet.verb, x.neg_triplet.object);
  d["neg_type"] = std::string(ingest::slot_name(x.neg_type));
  d["p"] = x.p;
  d["n"] = x.n;
  d["d"] = ingest::score_d(x);
  d["sim_sentence"] = optional_value(ingest::sentence_similarity(x));
  d["sim_word"] = optional_value(ingest::word_similarity(x));
  const auto roles = ingest::derive_roles(x);
  d["in_common"] = py::make_tuple(roles.in_common[0].lemma, roles.in_common[1].lemma);
  d["original"] = roles.original.lemma;
  d["replacement"] = roles.replacement.lemma;
  return d;
}

py::dict finding_dict(const analyze::Finding& f) {
  py::dict d;
  d["feature"] = f.feature_name;
  d["role"] = std::string(featurize::role_name(f.role));
  d["target"] = std::string(analyze::target_name(f.target));
  d["kind"] = std::string(featurize::kind_name(f.kind));
  d["effect"] = f.effect;
  d["statistic"] = f.statistic;
  d["df"] = f.df;
  d["p_raw"] = f.p_raw;
  d["p_adjusted"] = f.p_adjusted;
  d["n_effective"] = f.n_effective;
  d["example_words"] = f.example_words;
  return d;
}

struct Prepared {
  ingest::Dataset data;
  featurize::FeatureMatrix matrix;
};

Prepared prepare(const fs::path& scores, const lexres::Resources& res, std::size_t min_support,
                 const std::string& transform, unsigned jobs) {
  Prepared out;
  auto in = open_input(scores);
  out.data = ingest::read_scores(in);
  featurize::FeatureOptions opts;
  opts.min_support = min_support;
  opts.frequency_transform = parse_transform(transform);
  opts.jobs = jobs;
  py::gil_scoped_release unlocked;
  out.matrix = featurize::build_feature_matrix(out.data.instances, res, opts);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of vlm_probe: lexical resources, features and correlation analysis.";
  m.attr("__version__") = VLMPROBE_VERSION;

  // later registrations are tried first, so the subclass wins
  const auto& base_error = py::register_exception<Error>(m, "VlmProbeError", PyExc_ValueError);
  py::register_exception<ResourceNotFound>(m, "ResourceNotFound", base_error.ptr());

  // stats
  m.def("student_t_sf2", &stats::student_t_sf2, py::arg("t"), py::arg("df"),
        "Two-tailed Student t tail probability.");
  m.def("student_t_critical", &stats::student_t_critical, py::arg("alpha"), py::arg("df"));
  m.def(
      "welch_ttest",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const auto r = stats::welch_ttest(a, b);
        return py::dict(py::arg("mean_diff") = r.mean_diff, py::arg("t") = r.t, py::arg("df") = r.df,
                        py::arg("p") = r.p, py::arg("n_true") = r.n_true, py::arg("n_false") = r.n_false);
      },
      py::arg("group_true"), py::arg("group_false"));
  m.def(
      "pearson",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        const auto r = stats::pearson(x, y);
        return py::dict(py::arg("r") = r.r, py::arg("t") = r.t, py::arg("df") = r.df, py::arg("p") = r.p,
                        py::arg("n") = r.n);
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "linfit_band",
      [](const std::vector<double>& x, const std::vector<double>& y, std::size_t grid_points, double confidence) {
        const auto b = stats::linfit_band(x, y, grid_points, confidence);
        return py::dict(py::arg("slope") = b.slope, py::arg("intercept") = b.intercept,
                        py::arg("residual_sd") = b.residual_sd, py::arg("x") = b.x_grid, py::arg("y_hat") = b.y_hat,
                        py::arg("lo") = b.lo, py::arg("hi") = b.hi);
      },
      py::arg("x"), py::arg("y"), py::arg("grid_points") = 50, py::arg("confidence") = 0.95);
  m.def(
      "box_summary",
      [](const std::vector<double>& v) {
        const auto b = stats::box_summary(v);
        return py::dict(py::arg("q1") = b.q1, py::arg("median") = b.median, py::arg("q3") = b.q3,
                        py::arg("whisker_lo") = b.whisker_lo, py::arg("whisker_hi") = b.whisker_hi,
                        py::arg("outliers") = b.outliers, py::arg("n") = b.n);
      },
      py::arg("values"));
  m.def(
      "adjust_p_values",
      [](const std::vector<double>& p, const std::string& correction) {
        return analyze::adjust_p_values(p, parse_correction(correction));
      },
      py::arg("p_raw"), py::arg("correction") = "benjamini_hochberg");

  // scores interchange
  m.def(
      "read_scores",
      [](const fs::path& path) {
        auto in = open_input(path);
        const auto data = ingest::read_scores(in);
        py::list rows;
        for (const auto& x : data.instances) rows.append(instance_dict(x));
        return rows;
      },
      py::arg("path"), "Parse a scores file; raises on the first schema problem.");
  m.def(
      "validate_scores",
      [](const fs::path& path) {
        auto in = open_input(path);
        const auto report = ingest::validate_scores(in);
        py::list issues;
        for (const auto& i : report.issues) issues.append(py::make_tuple(i.line, i.message));
        return py::dict(py::arg("ok") = report.ok(), py::arg("valid") = report.valid,
                        py::arg("unknown_keys") = report.unknown_keys, py::arg("issues") = issues);
      },
      py::arg("path"));

  // resources
  py::class_<lexres::Resources>(m, "Resources")
      .def_static(
          "load", [](const fs::path& dir) { return lexres::load_resources(lexres::ResourcePaths::in_directory(dir)); },
          py::arg("directory"))
      .def_property_readonly("wordnet_version", [](const lexres::Resources& r) { return r.wordnet.version(); })
      .def_property_readonly("synset_total", [](const lexres::Resources& r) { return r.wordnet.size(); })
      .def(
          "first_synset",
          [](const lexres::Resources& r, const std::string& lemma, const std::string& pos) -> py::object {
            const auto* s = lexres::most_common_synset(r.wordnet, lemma, parse_pos(pos));
            return s ? py::cast(s->name) : py::none();
          },
          py::arg("lemma"), py::arg("pos") = "n")
      .def(
          "hypernyms",
          [](const lexres::Resources& r, const std::string& lemma, const std::string& pos) {
            const auto* s = lexres::most_common_synset(r.wordnet, lemma, parse_pos(pos));
            return s ? lexres::hypernym_closure(r.wordnet, *s) : std::set<std::string>{};
          },
          py::arg("lemma"), py::arg("pos") = "n", "Names of every ancestor of the lemma's first sense.")
      .def(
          "synset_count",
          [](const lexres::Resources& r, const std::string& lemma, const std::string& pos) {
            return lexres::synset_count(r.wordnet, lemma, parse_pos(pos));
          },
          py::arg("lemma"), py::arg("pos") = "n")
      .def(
          "categories",
          [](const lexres::Resources& r, const std::string& lexicon, const std::string& lemma) {
            return lexres::lookup_categories(category_lexicon(r, lexicon), lemma);
          },
          py::arg("lexicon"), py::arg("lemma"))
      .def(
          "concreteness",
          [](const lexres::Resources& r, const std::string& lemma) {
            return optional_value(lexres::lookup_numeric(r.concreteness, lemma));
          },
          py::arg("lemma"))
      .def(
          "frequency",
          [](const lexres::Resources& r, const std::string& lemma) {
            return optional_value(lexres::lookup_numeric(r.frequency, lemma));
          },
          py::arg("lemma"));

  // features and analysis
  m.def(
      "build_feature_matrix",
      [](const fs::path& scores, const lexres::Resources& res, std::size_t min_support, const std::string& transform,
         unsigned jobs) {
        const auto prep = prepare(scores, res, min_support, transform, jobs);
        py::list columns;
        for (const auto& c : prep.matrix.columns) {
          py::dict col;
          col["name"] = c.name;
          col["family"] = std::string(featurize::family_name(c.family));
          col["role"] = std::string(featurize::role_name(c.role));
          col["kind"] = std::string(featurize::kind_name(c.kind));
          col["support"] = c.support;
          if (c.kind == featurize::Kind::binary) {
            col["values"] = std::vector<int>(c.bits.begin(), c.bits.end());
          } else {
            col["values"] = nan_as_none(c.values);
            col["raw"] = nan_as_none(c.raw);
          }
          columns.append(col);
        }
        return py::dict(py::arg("instance_ids") = prep.matrix.instance_ids, py::arg("columns") = columns,
                        py::arg("warnings") = prep.matrix.warnings);
      },
      py::arg("scores"), py::arg("resources"), py::arg("min_support") = 10,
      py::arg("frequency_transform") = "log10p1", py::arg("jobs") = 1);

  m.def(
      "analyze",
      [](const fs::path& scores, const lexres::Resources& res, const std::vector<std::string>& targets, double alpha,
         const std::string& correction, std::size_t min_support, const std::string& transform, unsigned jobs) {
        const auto prep = prepare(scores, res, min_support, transform, jobs);
        analyze::AnalysisOptions opts;
        opts.alpha = alpha;
        opts.correction = parse_correction(correction);
        opts.jobs = jobs;
        opts.targets.clear();
        for (const auto& t : targets) opts.targets.push_back(parse_target(t));
        analyze::AnalysisResult result;
        {
          py::gil_scoped_release unlocked;
          result = analyze::run_correlation(prep.matrix, analyze::target_scores(prep.data.instances), opts);
        }
        py::list findings;
        for (const auto& f : result.findings) findings.append(finding_dict(f));
        return py::dict(py::arg("findings") = findings, py::arg("tests_run") = result.tests_run,
                        py::arg("warnings") = result.warnings);
      },
      py::arg("scores"), py::arg("resources"), py::arg("targets") = std::vector<std::string>{"p", "n", "d"},
      py::arg("alpha") = 0.05, py::arg("correction") = "none", py::arg("min_support") = 10,
      py::arg("frequency_transform") = "log10p1", py::arg("jobs") = 1);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "vlm-probe");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        py::gil_scoped_release unlocked;
        return cli::run(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"), "Run the command-line tool in-process and return its exit code.");
}
