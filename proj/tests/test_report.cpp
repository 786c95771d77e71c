#include <gtest/gtest.h>

#include <fstream>
#include <regex>

#include "gaudit/report/plan.hpp"
#include "support.hpp"

using namespace gaudit;
using namespace gaudit::report;
using nlohmann::json;
using testing_support::TempDir;

namespace {

const std::filesystem::path kSamples = GAUDIT_SAMPLES_DIR;

json sample_plan() {
  std::ifstream in(kSamples / "plan.json");
  return json::parse(in);
}

AuditReport run_samples(const std::filesystem::path& out_dir) {
  PlanContext ctx(kSamples, out_dir);
  return run_plan(ctx, sample_plan(), "2024-01-01T00:00:00Z");
}

AuditReport frequency_only() {
  AuditReport r;
  r.timestamp = "2024-01-01T00:00:00Z";
  r.inputs = {{"corpus:c", "abc"}};
  r.config_digest = config_digest(r.inputs);
  corpus::FrequencyReport f;
  f.counts = {{"he", 2}, {"she", 0}, {"they", 1}};
  f.total_tokens = 6;
  r.add("frequency", {"count_frequencies", {{"lexicon", "lex"}}, to_json(f)});
  return r;
}

std::size_t count_lines_matching(const std::string& text, const std::regex& re) {
  std::size_t n = 0;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) n += std::regex_search(line, re);
  return n;
}

}  // namespace

TEST(ConfigDigest, DeterministicAndSensitive) {
  const std::map<std::string, std::string> a{{"x", "1"}, {"y", "2"}};
  EXPECT_EQ(config_digest(a), config_digest({{"y", "2"}, {"x", "1"}}));
  EXPECT_NE(config_digest(a), config_digest({{"x", "1"}, {"y", "3"}}));
  // Field boundaries are part of the digest.
  EXPECT_NE(config_digest({{"ab", "c"}}), config_digest({{"a", "bc"}}));
  EXPECT_EQ(config_digest(a).size(), 64u);
}

TEST(Report, MinimalFrequencyReport) {
  TempDir dir;
  const auto r = frequency_only();
  emit_report(r, ReportFormat::machine, dir / "r.json");
  const auto j = json::parse(testing_support::read_text(dir / "r.json"));
  EXPECT_EQ(j.at("sections").size(), 1u);
  EXPECT_EQ(j.at("sections").at("frequency").at(0).at("result").at("rates_per_million").at("he"), 2.0 / 6.0 * 1e6);
  EXPECT_EQ(j.at("tool_version"), kToolVersion);
  const auto md = human_text(r);
  EXPECT_NE(md.find("## Frequency"), std::string::npos);
  EXPECT_EQ(md.find("## Weat"), std::string::npos);
}

TEST(Report, MachineRoundTripAndKeyOrder) {
  const auto r = run_samples(TempDir().path());
  const auto text = machine_text(r);
  EXPECT_EQ(report_from_json(json::parse(text)), r);
  // Keys are emitted sorted, so the text is a function of the content only.
  EXPECT_LT(text.find("\"config_digest\""), text.find("\"inputs\""));
  EXPECT_LT(text.find("\"sections\""), text.find("\"timestamp\""));
  EXPECT_THROW(report_from_json(json::parse(R"({"tool_version":"x"})")), InputError);
  EXPECT_THROW(report_from_json(json::parse(
                   R"({"tool_version":"x","timestamp":"t","config_digest":"d","inputs":{},"sections":{"bogus":[]}})")),
               InputError);
}

TEST(Report, IdenticalInputsAreByteIdentical) {
  TempDir a, b;
  emit_report(run_samples(a.path()), a.path());
  emit_report(run_samples(b.path()), b.path());
  EXPECT_EQ(testing_support::read_text(a / "report.json"), testing_support::read_text(b / "report.json"));
  EXPECT_EQ(testing_support::read_text(a / "report.md"), testing_support::read_text(b / "report.md"));
}

TEST(Report, EmptyAndUnwritable) {
  TempDir dir;
  EXPECT_THROW(emit_report(AuditReport{}, ReportFormat::machine, dir / "r.json"), InputError);
  EXPECT_THROW(emit_report(AuditReport{}, dir.path()), InputError);
  EXPECT_THROW(emit_report(frequency_only(), ReportFormat::machine, dir / "missing" / "sub" / "r.json"), IoError);
  testing_support::write_text(dir / "file", "x");
  EXPECT_THROW(emit_report(frequency_only(), dir / "file"), IoError);
  AuditReport r;
  EXPECT_THROW(r.add("plots", {}), InputError);
}

TEST(Report, SamplePlanProbeAggregates) {
  const auto r = run_samples(TempDir().path());
  const auto& probes = r.sections.at("probes");
  ASSERT_EQ(probes.size(), 2u);
  const auto& results = probes[0].result.at("results");
  ASSERT_EQ(results.size(), 5u);
  // Hand-computed from samples/fixture.jsonl: 3 templates x 3 names per pair.
  const std::vector<std::tuple<std::string, double, double, int>> expected{
      {"he", 1.0, 0.5, 0}, {"she", 1.0, 0.5, 0}, {"they", 0.0, 0.25, 0}, {"xe", 0.0, 0.0, 9}, {"ze", 0.0, 0.0, 9}};
  for (std::size_t i = 0; i < 5; ++i) {
    const auto& [nom, acc, mean, unscorable] = expected[i];
    EXPECT_EQ(results[i].at("nominative"), nom);
    EXPECT_EQ(results[i].at("case_count"), 9);
    EXPECT_EQ(results[i].at("accuracy").get<double>(), acc) << nom;
    EXPECT_EQ(results[i].at("mean_probability").get<double>(), mean) << nom;
    EXPECT_EQ(results[i].at("unscorable_count"), unscorable) << nom;
  }

  const auto& rows = probes[1].result.at("rows");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0].at("pronoun"), "he");
  EXPECT_EQ(rows[0].at("group_scores").at("male").get<double>(), 0.5);
  EXPECT_EQ(rows[0].at("group_scores").at("female").get<double>(), 0.1875);
  EXPECT_EQ(rows[1].at("group_scores").at("female").get<double>(), 0.5);
  EXPECT_EQ(rows[2].at("group_scores").at("all").get<double>(), 0.0625);
  EXPECT_EQ(rows[3].at("unscorable_count"), 4);
}

TEST(Report, SamplePlanSectionsAndInputs) {
  const auto r = run_samples(TempDir().path());
  for (const char* s : {"frequency", "neighbors", "similarity", "weat", "subspace", "probes"})
    EXPECT_TRUE(r.sections.contains(s)) << s;
  EXPECT_FALSE(r.sections.contains("classifier"));
  EXPECT_TRUE(r.inputs.contains("corpus:corpus"));
  EXPECT_TRUE(r.inputs.contains("embedding:embedding.txt"));
  EXPECT_TRUE(r.inputs.contains("templates"));
  EXPECT_TRUE(r.inputs.contains("names"));
  EXPECT_TRUE(r.inputs.contains("plan"));
  EXPECT_EQ(r.inputs.at("backend"), "fixture:" + util::sha256_file(kSamples / "fixture.jsonl"));
  EXPECT_EQ(r.config_digest, config_digest(r.inputs));

  const auto& weat = r.sections.at("weat")[0];
  EXPECT_EQ(weat.parameters.at("permutations"), 2000);
  const double d = weat.result.at("effect_size_d").get<double>();
  EXPECT_GE(d, -2.0);
  EXPECT_LE(d, 2.0);
  // Every entry records what produced it.
  for (const auto& [name, entries] : r.sections)
    for (const auto& e : entries) {
      EXPECT_FALSE(e.operation.empty());
      EXPECT_TRUE(e.parameters.is_object());
    }
}

TEST(Report, ConfigDigestTracksInputs) {
  TempDir dir;
  for (const auto& f : std::filesystem::recursive_directory_iterator(kSamples)) {
    const auto rel = std::filesystem::relative(f.path(), kSamples);
    if (f.is_directory())
      std::filesystem::create_directories(dir / rel.string());
    else
      std::filesystem::copy_file(f.path(), dir / rel.string());
  }
  auto plan = sample_plan();
  PlanContext a(dir.path(), dir.path());
  const auto first = run_plan(a, plan, "t");
  std::ofstream(dir / "corpus" / "news.txt", std::ios::app) << "She left.\n";
  PlanContext b(dir.path(), dir.path());
  const auto second = run_plan(b, plan, "t");
  EXPECT_NE(first.config_digest, second.config_digest);
  EXPECT_NE(first.inputs.at("corpus:corpus"), second.inputs.at("corpus:corpus"));
  EXPECT_EQ(first.inputs.at("embedding:embedding.txt"), second.inputs.at("embedding:embedding.txt"));
}

TEST(Report, HumanTablesMirrorTheReferenceLayouts) {
  const auto md = human_text(run_samples(TempDir().path()));
  EXPECT_NE(md.find("| Pronoun pair | Accuracy | Mean probability | Cases | Unscorable |"), std::string::npos);
  // Exactly five data rows in the pair table.
  EXPECT_EQ(count_lines_matching(md, std::regex(R"(^\| (his-he|her-she|their-they|xir-xe|zir-ze) \|)")), 5u);
  EXPECT_NE(md.find("| his-he | 1 | 0.5 |"), std::string::npos);
  EXPECT_NE(md.find("| Targets | Attributes | Effect size d"), std::string::npos);
  EXPECT_NE(md.find("## Neighbors"), std::string::npos);
  EXPECT_NE(md.find("## Similarity"), std::string::npos);
  EXPECT_NE(md.find("## Subspace"), std::string::npos);
  EXPECT_NE(md.find("Config digest: "), std::string::npos);
}

TEST(Plan, StepErrors) {
  TempDir dir;
  PlanContext ctx(kSamples, dir.path());
  EXPECT_THROW(run_plan(ctx, json::parse(R"({"steps":[{"op":"dance"}]})"), "t"), InputError);
  EXPECT_THROW(run_plan(ctx, json::parse(R"({"steps":[{"op":"freq"}]})"), "t"), InputError);
  EXPECT_THROW(run_plan(ctx, json::parse(R"({"steps":[{"nop":1}]})"), "t"), InputError);
  EXPECT_THROW(run_plan(ctx, json::parse(R"({"embedding":"embedding.txt","steps":[{"op":"weat","x":"nosuchset","y":"binary_all","a":"pleasant","b":"unpleasant"}]})"), "t"),
               InputError);
  EXPECT_THROW(run_plan(ctx, json::parse(R"({"backend":"fixture:fixture.jsonl","steps":[{"op":"classifier-exp","c1":"a","c2":"b","test":"c"}]})"), "t"),
               InputError);
}

TEST(Plan, MiningAndDatasetStepsWriteFiles) {
  TempDir dir;
  testing_support::write_text(dir / "corpus" / "a.txt",
                              "Ana Ruiz and Li Wei met. They left.\nSam Stone and Kim Park sang. Then they rested.\n"
                              "Noor smiled. He waved. Jo ran. He laughed.\n");
  PlanContext ctx(dir.path(), dir.path());
  const auto plan = json::parse(R"({"corpus":{"path":"corpus","docs_per_line":true},"steps":[
      {"op":"mine-plural","output":"plural.jsonl"},
      {"op":"mine-pronoun","pronoun":"he","label":"he","output":"he.jsonl"},
      {"op":"import-verified","input":"plural.jsonl","output":"verified.jsonl"},
      {"op":"dataset","pos":"he.jsonl","neg":"plural.jsonl","seed":3,"train_fraction":0.5,"output":"c2.jsonl"},
      {"op":"freq"}]})");
  const auto r = run_plan(ctx, plan, "t");
  EXPECT_EQ(corpus::read_pairs(dir / "plural.jsonl").size(), 2u);
  EXPECT_EQ(corpus::read_pairs(dir / "he.jsonl").size(), 2u);
  EXPECT_EQ(testing_support::read_text(dir / "verified.jsonl"), testing_support::read_text(dir / "plural.jsonl"));
  const auto ds = corpus::read_dataset(dir / "c2.jsonl");
  EXPECT_EQ(ds.train.size(), 2u);
  EXPECT_EQ(ds.test.size(), 2u);
  EXPECT_EQ(r.sections.at("frequency").size(), 1u);
}

TEST(Plan, RecordedFixtureReplaysToTheSameReport) {
  TempDir dir;
  auto plan = sample_plan();
  plan["steps"] = json::array({json{{"op", "probe-misgender"}, {"templates", "templates.jsonl"}, {"names", "names.txt"},
                                    {"record", "replay.jsonl"}}});
  PlanContext a(kSamples, dir.path());
  const auto first = run_plan(a, plan, "t");
  plan["backend"] = "fixture:" + (dir / "replay.jsonl").string();
  plan["steps"][0].erase("record");
  PlanContext b(kSamples, dir.path());
  const auto second = run_plan(b, plan, "t");
  EXPECT_EQ(first.sections, second.sections);
}

TEST(Plan, Timestamps) {
  EXPECT_EQ(iso_utc(0), "1970-01-01T00:00:00Z");
  EXPECT_EQ(iso_utc(1704067200), "2024-01-01T00:00:00Z");
}
