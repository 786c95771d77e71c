// Command-line front end. Every subcommand is translated into a one-step
// plan and run through the same code path as `audit run`.

#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gaudit/report/plan.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gaudit;

namespace {

struct Common {
  std::string out_dir;
  std::string timestamp;
  std::string word_sets;
  std::string format = "both";
};

struct Subcommand {
  CLI::App* app;
  json plan = json::object();
  json step = json::object();
};

int exit_code_for(const Error& e) {
  const std::string kind = e.kind();
  if (kind == "input" || kind == "format" || kind == "degenerate") return 2;
  if (kind == "backend" || kind == "protocol") return 3;
  if (kind == "io") return 4;
  return 1;
}

void print_error(const std::string& kind, const std::string& message, std::size_t line = 0) {
  json rec{{"error", {{"kind", kind}, {"message", message}}}};
  if (line) rec["error"]["line"] = line;
  std::cerr << rec.dump() << std::endl;
}

void write_report(const report::AuditReport& r, const Common& common) {
  if (common.out_dir.empty()) {
    if (r.empty()) return;
    std::cout << (common.format == "human" ? report::human_text(r) : report::machine_text(r));
    return;
  }
  if (r.empty()) return;
  std::error_code ec;
  fs::create_directories(common.out_dir, ec);
  if (ec) throw IoError("cannot create " + common.out_dir + ": " + ec.message());
  if (common.format != "human") report::emit_report(r, report::ReportFormat::machine, fs::path(common.out_dir) / "report.json");
  if (common.format != "machine") report::emit_report(r, report::ReportFormat::human, fs::path(common.out_dir) / "report.md");
}

int run_single(const Subcommand& sub, const Common& common) {
  json plan = sub.plan;
  if (!common.word_sets.empty()) plan["word_sets"] = common.word_sets;
  plan["steps"] = json::array({sub.step});

  report::PlanContext ctx(fs::current_path(), common.out_dir.empty() ? fs::current_path() : fs::path(common.out_dir));
  const auto timestamp = common.timestamp.empty() ? report::default_timestamp() : common.timestamp;
  write_report(report::run_plan(ctx, plan, timestamp), common);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gendered-language audit toolkit: corpus statistics, embedding association tests, "
               "subspace geometry and masked-LM probes."};
  app.require_subcommand(1);
  app.set_version_flag("--version", report::kToolVersion);

  Common common;
  app.add_option("--out", common.out_dir, "Directory for report.json / report.md (default: report JSON on stdout)");
  app.add_option("--timestamp", common.timestamp, "Report timestamp (default: SOURCE_DATE_EPOCH or now)");
  app.add_option("--words", common.word_sets, "JSON file of named word sets added to the bundled ones");
  app.add_option("--format", common.format, "Report format written")->check(CLI::IsMember({"machine", "human", "both"}));

  std::deque<Subcommand> subs;  // stable references
  auto add = [&](const char* name, const char* help) -> Subcommand& {
    subs.push_back({app.add_subcommand(name, help)});
    subs.back().step["op"] = name;
    return subs.back();
  };

  // Option storage for every subcommand; copied into JSON after parsing.
  struct Opts {
    std::string corpus, lexicon = "pronouns", detector = "heuristic", output = "-", pronoun, label, input;
    bool docs_per_line = false;
    std::size_t min_mentions = 2;
    std::string pos, neg;
    std::uint64_t seed = 0;
    double train_fraction = 0.8;
    std::string emb, emb_format = "autodetect";
    std::vector<std::string> queries, words;
    std::size_t k = 5, components = 1;
    bool include_self = false;
    std::string rows, cols, set, x, y, a, b;
    std::optional<std::uint64_t> permutations;
    std::string sets = "binary,nonbinary,all";
    std::string templates, names, pairs = "his:he,her:she,their:they,xir:xe,zir:ze", backend, record;
    bool full_vocab = false;
    std::size_t concurrency = 8;
    std::string occupations = "occupations", pronouns = "he,she,they,xe,ze", groups = "male,female,all";
    std::string c1, c2, c3, test, warmup, warmup_labels = "i,we", work_dir = "classifier_work";
    int epochs = 3;
    std::string config;
  } o;

  auto corpus_opts = [&](CLI::App* s) {
    s->add_option("--corpus", o.corpus, "Corpus file or directory of UTF-8 text files")->required();
    s->add_flag("--docs-per-line", o.docs_per_line, "Treat every line as a separate document");
  };
  auto emb_opts = [&](CLI::App* s) {
    s->add_option("--emb", o.emb, "Embedding file (word followed by vector components per line)")->required();
    s->add_option("--emb-format", o.emb_format, "plain, headered or autodetect");
  };

  auto& freq = add("freq", "Count lexicon words in a corpus");
  corpus_opts(freq.app);
  freq.app->add_option("--lexicon", o.lexicon, "Word-set name or word-list file");

  auto& mine_plural = add("mine-plural", "Mine plural-they sentence pairs");
  corpus_opts(mine_plural.app);
  mine_plural.app->add_option("--lexicon", o.lexicon, "Pronoun lexicon (set name or file)");
  mine_plural.app->add_option("--detector", o.detector, "heuristic, or a service URL whose /ner endpoint tags persons");
  mine_plural.app->add_option("--min-persons", o.min_mentions, "Person mentions required in the first sentence");
  mine_plural.app->add_option("--output", o.output, "JSONL destination ('-' for stdout)");

  auto& mine_pronoun = add("mine-pronoun", "Mine sentence pairs for one pronoun");
  corpus_opts(mine_pronoun.app);
  mine_pronoun.app->add_option("--pronoun", o.pronoun, "Target pronoun")->required();
  mine_pronoun.app->add_option("--label", o.label, "he, she, they_singular or they_plural")->required();
  mine_pronoun.app->add_option("--lexicon", o.lexicon, "Pronoun lexicon (set name or file)");
  mine_pronoun.app->add_option("--output", o.output, "JSONL destination ('-' for stdout)");

  auto& import = add("import-verified", "Re-validate and import a reviewed subset of mined pairs");
  import.app->add_option("--input", o.input, "Reviewed JSONL pairs")->required();
  import.app->add_option("--lexicon", o.lexicon, "Pronoun lexicon (set name or file)");
  import.app->add_option("--detector", o.detector, "heuristic, or a service URL");
  import.app->add_option("--output", o.output, "JSONL destination ('-' for stdout)");

  auto& dataset = add("dataset", "Build a balanced train/test classifier dataset");
  dataset.app->add_option("--pos", o.pos, "Positive pairs (JSONL)")->required();
  dataset.app->add_option("--neg", o.neg, "Negative pairs (JSONL)")->required();
  dataset.app->add_option("--seed", o.seed, "Shuffle seed");
  dataset.app->add_option("--train-fraction", o.train_fraction, "Share of each class put in the training split");
  dataset.app->add_option("--output", o.output, "JSONL destination ('-' for stdout)");

  auto& neighbors = add("neighbors", "Nearest neighbors by cosine similarity");
  emb_opts(neighbors.app);
  neighbors.app->add_option("--query", o.queries, "Query word (repeatable)")->required();
  neighbors.app->add_option("--k", o.k, "Neighbors per query");
  neighbors.app->add_flag("--include-self", o.include_self, "Keep the query itself in the result");

  auto& simmatrix = add("simmatrix", "Cosine similarity matrix between two word sets");
  emb_opts(simmatrix.app);
  simmatrix.app->add_option("--rows", o.rows, "Row word set")->required();
  simmatrix.app->add_option("--cols", o.cols, "Column word set")->required();

  auto& avgsim = add("average-similarity", "Mean and mean absolute cosine of words against a set");
  emb_opts(avgsim.app);
  avgsim.app->add_option("--word", o.words, "Word (repeatable)")->required();
  avgsim.app->add_option("--set", o.set, "Word set")->required();

  auto& weat = add("weat", "Word embedding association test");
  emb_opts(weat.app);
  weat.app->add_option("--x", o.x, "First target set")->required();
  weat.app->add_option("--y", o.y, "Second target set")->required();
  weat.app->add_option("--a", o.a, "First attribute set")->required();
  weat.app->add_option("--b", o.b, "Second attribute set")->required();
  weat.app->add_option("--permutations", o.permutations, "Repartitions for the p-value (exact when enough)");
  weat.app->add_option("--seed", o.seed, "Sampling seed");

  auto& sub = add("subspace", "PCA subspaces of word sets and their distances");
  emb_opts(sub.app);
  sub.app->add_option("--sets", o.sets, "Comma-separated word sets");
  sub.app->add_option("--k", o.components, "Components per set");

  auto backend_opt = [&](CLI::App* s) {
    s->add_option("--backend", o.backend, "Service URL or fixture:FILE")->required();
    s->add_option("--record", o.record, "Save every backend response to this fixture file");
    s->add_option("--concurrency", o.concurrency, "Parallel scoring requests");
  };
  auto& misgender = add("probe-misgender", "Template misgendering battery");
  misgender.app->add_option("--templates", o.templates, "Template JSONL (default: bundled battery)");
  misgender.app->add_option("--names", o.names, "Name list, one per line (default: bundled list)");
  misgender.app->add_option("--pairs", o.pairs, "possessive:nominative pairs, comma separated");
  misgender.app->add_flag("--full-vocab", o.full_vocab, "Predict with the backend's full-vocabulary top-1");
  backend_opt(misgender.app);

  auto& occupation = add("probe-occupation", "Pronoun probabilities for occupation templates");
  occupation.app->add_option("--occupations", o.occupations, "Occupation word set with groups");
  occupation.app->add_option("--pronouns", o.pronouns, "Comma-separated pronouns");
  occupation.app->add_option("--groups", o.groups, "Comma-separated groups to average over");
  backend_opt(occupation.app);

  auto& classifier = add("classifier-exp", "Singular/plural classifier experiment");
  classifier.app->add_option("--c1", o.c1, "C1 dataset (they_singular vs they_plural)")->required();
  classifier.app->add_option("--c2", o.c2, "C2 dataset (he vs they_plural)")->required();
  classifier.app->add_option("--c3", o.c3, "Optional third dataset");
  classifier.app->add_option("--test", o.test, "All-plural test dataset")->required();
  classifier.app->add_option("--warmup", o.warmup, "Warm-up dataset trained first under the same run");
  classifier.app->add_option("--warmup-labels", o.warmup_labels, "Singular,plural labels of the warm-up set");
  classifier.app->add_option("--backend", o.backend, "Service URL")->required();
  classifier.app->add_option("--epochs", o.epochs, "Training epochs");
  classifier.app->add_option("--seed", o.seed, "Training seed");
  classifier.app->add_option("--work-dir", o.work_dir, "Where materialized datasets are written");

  auto* run = app.add_subcommand("run", "Run a declarative audit plan");
  run->add_option("--config", o.config, "Plan file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    print_error("usage", e.what());
    return 64;
  }

  auto csv = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
      auto comma = s.find(',', start);
      auto item = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!item.empty()) out.push_back(item);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  };
  auto corpus_json = [&] { return json{{"path", o.corpus}, {"docs_per_line", o.docs_per_line}}; };
  auto emb_json = [&] { return json{{"path", o.emb}, {"format", o.emb_format}}; };

  freq.plan["corpus"] = corpus_json();
  freq.step["lexicon"] = o.lexicon;

  mine_plural.plan["corpus"] = corpus_json();
  mine_plural.step.update({{"lexicon", o.lexicon}, {"detector", o.detector}, {"min_person_mentions", o.min_mentions},
                           {"output", o.output}});
  mine_pronoun.plan["corpus"] = corpus_json();
  mine_pronoun.step.update({{"lexicon", o.lexicon}, {"pronoun", o.pronoun}, {"label", o.label}, {"output", o.output}});
  import.step.update({{"lexicon", o.lexicon}, {"detector", o.detector}, {"input", o.input}, {"output", o.output}});
  dataset.step.update({{"pos", o.pos}, {"neg", o.neg}, {"seed", o.seed}, {"train_fraction", o.train_fraction},
                       {"output", o.output}});

  for (auto* s : {&neighbors, &simmatrix, &avgsim, &weat, &sub}) s->plan["embedding"] = emb_json();
  neighbors.step.update({{"queries", o.queries}, {"k", o.k}, {"exclude_self", !o.include_self}});
  simmatrix.step.update({{"rows", o.rows}, {"cols", o.cols}});
  avgsim.step.update({{"words", o.words}, {"set", o.set}});
  weat.step.update({{"x", o.x}, {"y", o.y}, {"a", o.a}, {"b", o.b}, {"seed", o.seed}});
  if (o.permutations) weat.step["permutations"] = *o.permutations;
  sub.step.update({{"sets", csv(o.sets)}, {"k", o.components}});

  for (auto* s : {&misgender, &occupation}) {
    s->plan["backend"] = o.backend;
    s->step["concurrency"] = o.concurrency;
    if (!o.record.empty()) s->step["record"] = o.record;
  }
  if (!o.templates.empty()) misgender.step["templates"] = o.templates;
  if (!o.names.empty()) misgender.step["names"] = o.names;
  misgender.step.update({{"pairs", o.pairs}, {"full_vocabulary", o.full_vocab}});
  occupation.step.update({{"occupations", o.occupations}, {"pronouns", csv(o.pronouns)}, {"groups", csv(o.groups)}});

  classifier.step.update({{"c1", o.c1}, {"c2", o.c2}, {"test", o.test}, {"backend", o.backend}, {"epochs", o.epochs},
                          {"seed", o.seed}, {"work_dir", o.work_dir}});
  if (!o.c3.empty()) classifier.step["c3"] = o.c3;
  if (!o.warmup.empty()) classifier.step.update({{"warmup", o.warmup}, {"warmup_labels", csv(o.warmup_labels)}});

  try {
    if (run->parsed()) {
      std::ifstream in(o.config);
      if (!in) throw IoError("cannot open plan " + o.config);
      json plan;
      try {
        in >> plan;
      } catch (const json::exception& e) {
        throw FormatError(o.config, 0, e.what());
      }
      const fs::path base = fs::absolute(o.config).parent_path();
      if (common.word_sets.size()) plan["word_sets"] = fs::absolute(common.word_sets).string();
      const fs::path out = common.out_dir.empty() ? fs::current_path() : fs::path(common.out_dir);
      std::error_code ec;
      fs::create_directories(out, ec);
      report::PlanContext ctx(base, out);
      std::string timestamp = common.timestamp;
      if (timestamp.empty()) timestamp = plan.value("timestamp", std::string());
      if (timestamp.empty()) timestamp = report::default_timestamp();
      auto r = report::run_plan(ctx, plan, timestamp);
      write_report(r, common);
      return 0;
    }
    for (const auto& s : subs)
      if (s.app->parsed()) return run_single(s, common);
  } catch (const FormatError& e) {
    print_error(e.kind(), e.what(), e.line());
    return exit_code_for(e);
  } catch (const Error& e) {
    print_error(e.kind(), e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 0;
}
