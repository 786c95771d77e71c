#pragma once

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaudit/corpus/dataset.hpp"
#include "gaudit/corpus/document.hpp"
#include "gaudit/corpus/frequency.hpp"
#include "gaudit/corpus/mining.hpp"
#include "gaudit/embedding/neighbors.hpp"
#include "gaudit/embedding/similarity.hpp"
#include "gaudit/embedding/table.hpp"
#include "gaudit/embedding/weat.hpp"
#include "gaudit/lexicons.hpp"
#include "gaudit/probe/backend.hpp"
#include "gaudit/probe/classifier.hpp"
#include "gaudit/probe/scoring.hpp"
#include "gaudit/probe/templates.hpp"
#include "gaudit/report/report.hpp"
#include "gaudit/service/client.hpp"
#include "gaudit/subspace/pca.hpp"

// Declarative audit plans. A plan is a JSON object:
//
//   {"corpus": {"path": "corpus/", "docs_per_line": false},
//    "embedding": {"path": "vectors.txt", "format": "autodetect"},
//    "word_sets": "sets.json",
//    "backend": "fixture:scores.jsonl",
//    "steps": [{"op": "freq", "lexicon": "pronouns"},
//              {"op": "weat", "x": "binary_all", "y": "nonbinary_all",
//               "a": "pleasant", "b": "unpleasant", "permutations": 10000}]}
//
// Relative paths are taken against the plan's directory. Each step adds one
// entry to the report, or writes a data file into the output directory for
// the mining and dataset steps.
namespace gaudit::report {

// Seconds since the epoch as an ISO-8601 UTC string.
inline std::string iso_utc(std::int64_t seconds) {
  std::time_t t = static_cast<std::time_t>(seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// SOURCE_DATE_EPOCH pins the timestamp for reproducible reports.
inline std::string default_timestamp() {
  if (const char* s = std::getenv("SOURCE_DATE_EPOCH"); s && *s) {
    try {
      return iso_utc(std::stoll(s));
    } catch (const std::exception&) {
      throw InputError("SOURCE_DATE_EPOCH must be an integer");
    }
  }
  return iso_utc(std::chrono::duration_cast<std::chrono::seconds>(
                     std::chrono::system_clock::now().time_since_epoch())
                     .count());
}

class PlanContext {
 public:
  explicit PlanContext(std::filesystem::path base_dir = ".", std::filesystem::path out_dir = ".")
      : base_(std::move(base_dir)), out_(std::move(out_dir)), sets_(lexicons::defaults()) {}

  std::filesystem::path resolve(const std::string& p) const {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_ / path;
  }

  std::filesystem::path output(const std::string& p) const {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : out_ / path;
  }

  void load_word_sets(const std::string& path) {
    const auto full = resolve(path);
    sets_.merge_file(full);
    inputs_["word_sets:" + path] = util::sha256_file(full);
  }

  // A set name from the library, or a path to a plain word list.
  WordSet word_set(const std::string& ref, WordRole role = WordRole::target) const {
    if (sets_.contains(ref)) return sets_.get(ref);
    const auto full = resolve(ref);
    if (std::filesystem::is_regular_file(full)) return WordSet(full.stem().string(), read_word_list(full), role);
    throw InputError("'" + ref + "' is neither a known word set nor a word-list file");
  }

  void note_set(const WordSet& s) {
    inputs_["set:" + s.name()] = util::sha256_hex(nlohmann::json(s.words()).dump());
  }

  void set_corpus(const std::string& path, bool docs_per_line) {
    corpus_path_ = resolve(path);
    corpus_opts_.docs_per_line = docs_per_line;
    corpus_label_ = path;
  }

  void set_embedding(const std::string& path, embedding::EmbeddingFormat format) {
    embedding_path_ = resolve(path);
    embedding_format_ = format;
    embedding_label_ = path;
    table_.reset();
  }

  void set_backend(const std::string& spec) {
    backend_spec_ = spec.rfind("fixture:", 0) == 0 ? "fixture:" + resolve(spec.substr(8)).string() : spec;
    backend_.reset();
  }

  const std::filesystem::path& corpus_path() {
    if (corpus_path_.empty()) throw InputError("no corpus configured");
    if (!inputs_.contains("corpus:" + corpus_label_)) inputs_["corpus:" + corpus_label_] = corpus_digest();
    return corpus_path_;
  }

  const corpus::CorpusOptions& corpus_options() const { return corpus_opts_; }

  std::vector<corpus::Document> documents() { return corpus::read_corpus(corpus_path(), corpus_opts_); }

  const embedding::EmbeddingTable& table() {
    if (embedding_path_.empty()) throw InputError("no embedding file configured");
    if (!table_) {
      table_ = std::make_unique<embedding::EmbeddingTable>(embedding::load_embeddings(embedding_path_, embedding_format_));
      inputs_["embedding:" + embedding_label_] = util::sha256_file(embedding_path_);
    }
    return *table_;
  }

  const probe::ScoringBackend& backend() {
    if (backend_spec_.empty()) throw InputError("no scoring backend configured");
    if (!backend_) {
      backend_ = probe::make_scoring_backend(backend_spec_);
      inputs_["backend"] = backend_->identity();
    }
    return *backend_;
  }

  const std::string& backend_spec() const { return backend_spec_; }

  std::map<std::string, std::string>& inputs() { return inputs_; }

 private:
  std::string corpus_digest() const {
    util::Sha256 h;
    for (const auto& f : corpus::corpus_files(corpus_path_)) {
      h.update(std::filesystem::relative(f, corpus_path_).generic_string()).update(std::string_view("\0", 1));
      h.update(util::sha256_file(f)).update(std::string_view("\0", 1));
    }
    return h.hex();
  }

  std::filesystem::path base_, out_;
  WordSetLibrary sets_;
  std::filesystem::path corpus_path_;
  std::string corpus_label_;
  corpus::CorpusOptions corpus_opts_;
  std::filesystem::path embedding_path_;
  std::string embedding_label_;
  embedding::EmbeddingFormat embedding_format_ = embedding::EmbeddingFormat::autodetect;
  std::unique_ptr<embedding::EmbeddingTable> table_;
  std::string backend_spec_;
  std::unique_ptr<probe::ScoringBackend> backend_;
  std::map<std::string, std::string> inputs_;
};

namespace steps {

inline std::vector<std::string> string_list(const nlohmann::json& step, const char* key) {
  const auto& v = step.at(key);
  if (v.is_string()) return {v.get<std::string>()};
  return v.get<std::vector<std::string>>();
}

// Data outputs; "-" is standard output.
template <typename Write>
void write_output(const PlanContext& ctx, const nlohmann::json& step, Write&& write) {
  const auto dest = step.at("output").get<std::string>();
  if (dest == "-") {
    write(std::cout);
    std::cout.flush();
    return;
  }
  const auto path = ctx.output(dest);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write(out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

inline void write_pairs(const PlanContext& ctx, const nlohmann::json& step, const std::vector<corpus::MinedPair>& pairs) {
  write_output(ctx, step, [&](std::ostream& out) { corpus::write_pairs(out, pairs); });
}

inline void freq(PlanContext& ctx, const nlohmann::json& step, AuditReport& report) {
  const auto lexicon = ctx.word_set(step.value("lexicon", std::string("pronouns")), WordRole::pronoun);
  ctx.note_set(lexicon);
  const auto r = corpus::count_frequencies(ctx.corpus_path(), lexicon);
  report.add("frequency", {"count_frequencies", {{"lexicon", lexicon.name()}}, to_json(r)});
}

inline std::unique_ptr<corpus::PersonDetector> detector(const std::string& spec) {
  if (spec.empty() || spec == "heuristic") return std::make_unique<corpus::HeuristicPersonDetector>();
  return std::make_unique<service::ServicePersonDetector>(service::ServiceClient(spec));
}

inline void mine_plural(PlanContext& ctx, const nlohmann::json& step) {
  const auto lexicon = ctx.word_set(step.value("lexicon", std::string("pronouns")), WordRole::pronoun);
  const auto det = detector(step.value("detector", std::string("heuristic")));
  corpus::MiningConfig cfg;
  cfg.min_person_mentions = step.value("min_person_mentions", cfg.min_person_mentions);
  const auto pairs = corpus::mine_plural_they(ctx.documents(), lexicon, *det, cfg);
  write_pairs(ctx, step, pairs);
}

inline void mine_pronoun(PlanContext& ctx, const nlohmann::json& step) {
  const auto lexicon = ctx.word_set(step.value("lexicon", std::string("pronouns")), WordRole::pronoun);
  const auto label = corpus::parse_label(step.at("label").get<std::string>());
  const auto pairs =
      corpus::mine_pronoun_sentences(ctx.documents(), step.at("pronoun").get<std::string>(), lexicon, label);
  write_pairs(ctx, step, pairs);
}

inline void import_verified(PlanContext& ctx, const nlohmann::json& step) {
  const auto lexicon = ctx.word_set(step.value("lexicon", std::string("pronouns")), WordRole::pronoun);
  const auto det = detector(step.value("detector", std::string("heuristic")));
  const auto pairs = corpus::import_verified(ctx.resolve(step.at("input").get<std::string>()), lexicon, *det);
  write_pairs(ctx, step, pairs);
}

inline void dataset(PlanContext& ctx, const nlohmann::json& step) {
  corpus::DatasetOptions opts;
  opts.train_fraction = step.value("train_fraction", opts.train_fraction);
  const auto ds = corpus::export_classifier_dataset(corpus::read_pairs(ctx.resolve(step.at("pos").get<std::string>())),
                                                    corpus::read_pairs(ctx.resolve(step.at("neg").get<std::string>())),
                                                    step.value("seed", std::uint64_t{0}), opts);
  write_output(ctx, step, [&](std::ostream& out) { corpus::write_dataset(out, ds); });
}

inline void neighbors(PlanContext& ctx, const nlohmann::json& step, AuditReport& report) {
  const auto k = step.value("k", std::size_t{5});
  embedding::NeighborOptions opts;
  opts.exclude_self = step.value("exclude_self", true);
  for (const auto& q : string_list(step, "queries")) {
    const auto r = embedding::nearest_neighbors(ctx.table(), corpus::unicode::fold_case(q), k, opts);
    report.add("neighbors", {"nearest_neighbors", {{"query", r.query}, {"k", k}, {"exclude_self", opts.exclude_self}},
                             to_json(r)});
  }
}

inline void simmatrix(PlanContext& ctx, const nlohmann::json& step, AuditReport& report) {
  const auto rows = ctx.word_set(step.at("rows").get<std::string>());
  const auto cols = ctx.word_set(step.at("cols").get<std::string>());
  ctx.note_set(rows);
  ctx.note_set(cols);
  report.add("similarity", {"similarity_matrix", {{"rows", rows.name()}, {"cols", cols.name()}},
                            to_json(embedding::similarity_matrix(ctx.table(), rows, cols))});
}

inline void average_similarity(PlanContext& ctx, const nlohmann::json& step, AuditReport& report) {
  const auto set = ctx.word_set(step.at("set").get<std::string>());
  ctx.note_set(set);
  for (const auto& w : string_list(step, "words")) {
    const auto word = corpus::unicode::fold_case(w);
    report.add("similarity", {"average_similarity", {{"word", word}, {"set", set.name()}},
                              to_json(word, set.name(), embedding::average_similarity(ctx.table(), word, set))});
  }
}

inline void weat(PlanContext& ctx, const nlohmann::json& step, AuditReport& report) {
  const auto x = ctx.word_set(step.at("x").get<std::string>());
  const auto y = ctx.word_set(step.at("y").get<std::string>());
  const auto a = ctx.word_set(step.at("a").get<std::string>(), WordRole::attribute);
  const auto b = ctx.word_set(step.at("b").get<std::string>(), WordRole::attribute);
  for (const auto* s : {&x, &y, &a, &b}) ctx.note_set(*s);
  embedding::WeatOptions opts;
  nlohmann::json params{{"x", x.name()}, {"y", y.name()}, {"a", a.name()}, {"b", b.name()}};
  if (step.contains("permutations") && !step.at("permutations").is_null()) {
    opts.permutations = step.at("permutations").get<std::uint64_t>();
    params["permutations"] = *opts.permutations;
  }
  opts.seed = step.value("seed", std::uint64_t{0});
  params["seed"] = opts.seed;
  report.add("weat", {"weat_effect_size", params, to_json(embedding::weat_effect_size(ctx.table(), x, y, a, b, opts))});
}

inline void subspace(PlanContext& ctx, const nlohmann::json& step, AuditReport& report) {
  const auto k = step.value("k", std::size_t{1});
  std::vector<subspace::SubspaceReport> reports;
  for (const auto& name : string_list(step, "sets")) {
    const auto set = ctx.word_set(name);
    ctx.note_set(set);
    reports.push_back(subspace::principal_components(ctx.table(), set, k));
  }
  subspace::fill_pairwise_distances(reports);
  for (const auto& r : reports)
    report.add("subspace", {"principal_components", {{"set", r.set_name}, {"k", k}}, to_json(r)});
}

// Saves live responses as a fixture when the step names a "record" file.
inline void maybe_record(PlanContext& ctx, const nlohmann::json& step, const probe::RecordingBackend& rec) {
  if (!step.contains("record")) return;
  const auto path = ctx.output(step.at("record").get<std::string>());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  rec.write(out);
}

inline void probe_misgender(PlanContext& ctx, const nlohmann::json& step, AuditReport& report) {
  nlohmann::json params;
  std::vector<probe::Template> templates;
  if (step.contains("templates")) {
    const auto path = ctx.resolve(step.at("templates").get<std::string>());
    templates = probe::load_templates(path);
    ctx.inputs()["templates"] = util::sha256_file(path);
    params["templates"] = step.at("templates");
  } else {
    templates = probe::default_templates();
    params["templates"] = "bundled";
  }
  std::vector<std::string> names;
  if (step.contains("names")) {
    const auto path = ctx.resolve(step.at("names").get<std::string>());
    names = read_word_list(path);
    ctx.inputs()["names"] = util::sha256_file(path);
    params["names"] = step.at("names");
  } else {
    names = probe::default_names();
    params["names"] = "bundled";
  }
  const auto pairs = step.contains("pairs") ? probe::parse_pairs(step.at("pairs").get<std::string>()) : probe::default_pairs();
  std::string pair_spec;
  for (const auto& p : pairs) pair_spec += (pair_spec.empty() ? "" : ",") + p.possessive + ":" + p.nominative;
  params["pairs"] = pair_spec;

  probe::ScoreOptions opts;
  opts.full_vocabulary = step.value("full_vocabulary", false);
  opts.concurrency = step.value("concurrency", opts.concurrency);
  params["full_vocabulary"] = opts.full_vocabulary;

  const auto cases = probe::render_templates(templates, names, pairs);
  probe::RecordingBackend rec(ctx.backend());
  const auto results = probe::score_cases(cases, rec, opts);
  maybe_record(ctx, step, rec);
  report.add("probes", {"score_cases", params, to_json(results)});
}

inline void probe_occupation(PlanContext& ctx, const nlohmann::json& step, AuditReport& report) {
  const auto occupations = ctx.word_set(step.value("occupations", std::string("occupations")), WordRole::occupation);
  ctx.note_set(occupations);
  const auto pronouns = step.contains("pronouns") ? string_list(step, "pronouns")
                                                  : std::vector<std::string>{"he", "she", "they", "xe", "ze"};
  probe::OccupationProbeOptions opts;
  if (step.contains("groups")) opts.groups = string_list(step, "groups");
  opts.concurrency = step.value("concurrency", opts.concurrency);
  probe::RecordingBackend rec(ctx.backend());
  const auto rows = probe::occupation_probe(occupations, pronouns, rec, opts);
  maybe_record(ctx, step, rec);
  report.add("probes", {"occupation_probe",
                        {{"occupations", occupations.name()}, {"pronouns", pronouns}, {"groups", opts.groups}},
                        to_json(rows)});
}

inline void classifier_exp(PlanContext& ctx, const nlohmann::json& step, AuditReport& report) {
  const std::string url = step.contains("backend") ? step.at("backend").get<std::string>() : ctx.backend_spec();
  if (url.rfind("http", 0) != 0) throw InputError("classifier experiment needs an http(s) service backend");
  probe::ServiceClassifierBackend backend{service::ServiceClient(url)};

  std::vector<probe::ClassifierSpec> specs;
  nlohmann::json params;
  for (const char* slot : {"c1", "c2", "c3"}) {
    if (!step.contains(slot)) continue;
    const auto path = ctx.resolve(step.at(slot).get<std::string>());
    std::string name = slot;
    name[0] = 'C';
    specs.push_back({name, corpus::read_dataset(path)});
    ctx.inputs()["dataset:" + name] = util::sha256_file(path);
    params[slot] = step.at(slot);
  }
  const auto test_path = ctx.resolve(step.at("test").get<std::string>());
  auto test = corpus::read_dataset(test_path);
  std::vector<corpus::DatasetRecord> test_records = test.train;
  test_records.insert(test_records.end(), test.test.begin(), test.test.end());
  ctx.inputs()["dataset:test"] = util::sha256_file(test_path);
  params["test"] = step.at("test");

  probe::ExperimentOptions opts;
  opts.work_dir = ctx.output(step.value("work_dir", std::string("classifier_work")));
  opts.epochs = step.value("epochs", opts.epochs);
  opts.seed = step.value("seed", opts.seed);
  if (step.contains("warmup")) {
    probe::WarmupSpec w;
    w.dataset_path = ctx.resolve(step.at("warmup").get<std::string>());
    if (step.contains("warmup_labels")) w.labels = string_list(step, "warmup_labels");
    opts.warmup = w;
    params["warmup"] = step.at("warmup");
  }
  params["epochs"] = opts.epochs;
  params["seed"] = opts.seed;
  const auto r = probe::run_classifier_experiment(specs, test_records, backend, opts);
  ctx.inputs()["classifier_backend"] = r.backend;
  report.add("classifier", {"classifier_experiment", params, to_json(r)});
}

}  // namespace steps

inline void run_step(PlanContext& ctx, const nlohmann::json& step, AuditReport& report) {
  const auto op = step.at("op").get<std::string>();
  if (op == "freq") steps::freq(ctx, step, report);
  else if (op == "mine-plural") steps::mine_plural(ctx, step);
  else if (op == "mine-pronoun") steps::mine_pronoun(ctx, step);
  else if (op == "import-verified") steps::import_verified(ctx, step);
  else if (op == "dataset") steps::dataset(ctx, step);
  else if (op == "neighbors") steps::neighbors(ctx, step, report);
  else if (op == "simmatrix") steps::simmatrix(ctx, step, report);
  else if (op == "average-similarity") steps::average_similarity(ctx, step, report);
  else if (op == "weat") steps::weat(ctx, step, report);
  else if (op == "subspace") steps::subspace(ctx, step, report);
  else if (op == "probe-misgender") steps::probe_misgender(ctx, step, report);
  else if (op == "probe-occupation") steps::probe_occupation(ctx, step, report);
  else if (op == "classifier-exp") steps::classifier_exp(ctx, step, report);
  else throw InputError("unknown step op '" + op + "'");
}

// Applies the plan's shared settings (corpus, embedding, word sets,
// backend) to the context.
inline void configure(PlanContext& ctx, const nlohmann::json& plan) {
  if (plan.contains("word_sets")) ctx.load_word_sets(plan.at("word_sets").get<std::string>());
  if (plan.contains("corpus")) {
    const auto& c = plan.at("corpus");
    if (c.is_string()) ctx.set_corpus(c.get<std::string>(), false);
    else ctx.set_corpus(c.at("path").get<std::string>(), c.value("docs_per_line", false));
  }
  if (plan.contains("embedding")) {
    const auto& e = plan.at("embedding");
    if (e.is_string()) ctx.set_embedding(e.get<std::string>(), embedding::EmbeddingFormat::autodetect);
    else
      ctx.set_embedding(e.at("path").get<std::string>(),
                        embedding::parse_embedding_format(e.value("format", std::string("autodetect"))));
  }
  if (plan.contains("backend")) ctx.set_backend(plan.at("backend").get<std::string>());
}

// Runs every step and returns the finished report. The config digest covers
// the plan itself plus the digests of everything it read.
inline AuditReport run_plan(PlanContext& ctx, const nlohmann::json& plan, std::string timestamp) {
  try {
    configure(ctx, plan);
    AuditReport report;
    for (const auto& step : plan.at("steps")) run_step(ctx, step, report);
    report.timestamp = std::move(timestamp);
    ctx.inputs()["plan"] = util::sha256_hex(plan.dump());
    report.inputs = ctx.inputs();
    report.config_digest = config_digest(report.inputs);
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed plan: ") + e.what());
  }
}

}  // namespace gaudit::report
