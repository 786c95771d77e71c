#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaudit/corpus/frequency.hpp"
#include "gaudit/embedding/neighbors.hpp"
#include "gaudit/embedding/similarity.hpp"
#include "gaudit/embedding/weat.hpp"
#include "gaudit/error.hpp"
#include "gaudit/probe/classifier.hpp"
#include "gaudit/probe/scoring.hpp"
#include "gaudit/subspace/pca.hpp"
#include "gaudit/util/sha256.hpp"

namespace gaudit::report {

inline constexpr const char* kToolVersion = "0.1.0";

inline const std::vector<std::string>& section_names() {
  static const std::vector<std::string> names{"frequency", "neighbors", "similarity", "weat",
                                              "subspace",  "probes",    "classifier"};
  return names;
}

// One operation's output together with what produced it.
struct ReportEntry {
  std::string operation;
  nlohmann::json parameters;
  nlohmann::json result;

  friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

struct AuditReport {
  std::string tool_version = kToolVersion;
  std::string timestamp;
  std::string config_digest;
  std::map<std::string, std::string> inputs;  // input name -> digest or identity
  std::map<std::string, std::vector<ReportEntry>> sections;

  void add(const std::string& section, ReportEntry entry) {
    if (std::find(section_names().begin(), section_names().end(), section) == section_names().end())
      throw InputError("unknown report section '" + section + "'");
    sections[section].push_back(std::move(entry));
  }

  bool empty() const {
    for (const auto& [name, entries] : sections)
      if (!entries.empty()) return false;
    return true;
  }

  friend bool operator==(const AuditReport&, const AuditReport&) = default;
};

// Digest over named inputs; order of insertion does not matter.
inline std::string config_digest(const std::map<std::string, std::string>& inputs) {
  util::Sha256 h;
  for (const auto& [k, v] : inputs) {
    h.update(k).update(std::string_view("\0", 1));
    h.update(v).update(std::string_view("\0", 1));
  }
  return h.hex();
}

// Result serializers. They copy numbers as computed; nothing is recomputed.

inline nlohmann::json to_json(const corpus::FrequencyReport& r) {
  return {{"counts", r.counts}, {"total_tokens", r.total_tokens}, {"rates_per_million", r.rates()}};
}

inline nlohmann::json to_json(const embedding::NeighborResult& r) {
  nlohmann::json n = nlohmann::json::array();
  for (const auto& x : r.neighbors) n.push_back({{"token", x.token}, {"similarity", x.similarity}});
  return {{"query", r.query}, {"neighbors", n}};
}

inline nlohmann::json to_json(const embedding::SimilarityMatrix& m) {
  return {{"rows", m.row_words},
          {"cols", m.col_words},
          {"values", m.values},
          {"missing_rows", m.missing_rows},
          {"missing_cols", m.missing_cols}};
}

inline nlohmann::json to_json(const std::string& word, const std::string& set, const embedding::AverageSimilarity& a) {
  return {{"word", word}, {"set", set}, {"mean", a.mean}, {"abs_mean", a.abs_mean}, {"used", a.used},
          {"missing", a.missing}};
}

inline nlohmann::json to_json(const embedding::WeatResult& r) {
  nlohmann::json j{{"x", r.x},
                   {"y", r.y},
                   {"a", r.a},
                   {"b", r.b},
                   {"statistic_s", r.statistic_s},
                   {"effect_size_d", r.effect_size_d},
                   {"permutations", r.permutations},
                   {"exact", r.exact},
                   {"missing_words", r.missing_words}};
  j["p_value"] = r.p_value ? nlohmann::json(*r.p_value) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json to_json(const subspace::SubspaceReport& r) {
  nlohmann::json dist = nlohmann::json::object();
  for (const auto& [key, d] : r.pairwise_distances) dist[key.second] = d;
  return {{"set_name", r.set_name},
          {"words", r.words},
          {"missing", r.missing},
          {"components", r.components},
          {"variances", r.variances},
          {"explained_variance_ratio", r.explained_variance_ratio},
          {"distances", dist}};
}

inline nlohmann::json to_json(const std::vector<probe::ProbeResult>& results) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json cases = nlohmann::json::array();
    for (const auto& c : r.per_case)
      cases.push_back({{"case_id", c.case_id}, {"predicted", c.predicted}, {"probability", c.probability},
                       {"unscorable", c.unscorable}});
    out.push_back({{"pair", r.pair.label()},
                   {"possessive", r.pair.possessive},
                   {"nominative", r.pair.nominative},
                   {"accuracy", r.accuracy},
                   {"mean_probability", r.mean_probability},
                   {"case_count", r.case_count},
                   {"unscorable_count", r.unscorable_count},
                   {"per_case", cases}});
  }
  return {{"results", out}};
}

inline nlohmann::json to_json(const std::vector<probe::OccupationProbeRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows)
    out.push_back({{"pronoun", r.pronoun}, {"group_scores", r.group_scores}, {"unscorable_count", r.unscorable_count}});
  return {{"rows", out}};
}

inline nlohmann::json to_json(const probe::ExperimentReport& r) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : r.classifiers)
    out.push_back({{"name", c.name},
                   {"run_id", c.run_id},
                   {"train_labels", c.train_labels},
                   {"train_size", c.train_size},
                   {"test_size", c.test_size},
                   {"predicted_plural", c.predicted_plural},
                   {"accuracy", c.accuracy},
                   {"matrix_labels", c.matrix_labels},
                   {"confusion_matrix", c.confusion_matrix}});
  return {{"backend", r.backend}, {"classifiers", out}};
}

// Machine form. nlohmann::json keeps object keys sorted, so equal reports
// dump to identical bytes.
inline nlohmann::json to_json(const AuditReport& r) {
  nlohmann::json sections = nlohmann::json::object();
  for (const auto& [name, entries] : r.sections) {
    if (entries.empty()) continue;
    nlohmann::json list = nlohmann::json::array();
    for (const auto& e : entries)
      list.push_back({{"operation", e.operation}, {"parameters", e.parameters}, {"result", e.result}});
    sections[name] = list;
  }
  return {{"tool_version", r.tool_version},
          {"timestamp", r.timestamp},
          {"config_digest", r.config_digest},
          {"inputs", r.inputs},
          {"sections", sections}};
}

inline AuditReport report_from_json(const nlohmann::json& j) {
  try {
    AuditReport r;
    r.tool_version = j.at("tool_version").get<std::string>();
    r.timestamp = j.at("timestamp").get<std::string>();
    r.config_digest = j.at("config_digest").get<std::string>();
    r.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    for (const auto& [name, list] : j.at("sections").items()) {
      if (std::find(section_names().begin(), section_names().end(), name) == section_names().end())
        throw InputError("malformed report: unknown section " + name);
      for (const auto& e : list) r.add(name, {e.at("operation").get<std::string>(), e.at("parameters"), e.at("result")});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
}

inline std::string machine_text(const AuditReport& r) { return to_json(r).dump(2) + "\n"; }

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline std::string num(const nlohmann::json& v) {
  if (v.is_null()) return "n/a";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  return num(v.get<double>());
}

inline void row(std::ostream& out, const std::vector<std::string>& cells) {
  out << '|';
  for (const auto& c : cells) out << ' ' << c << " |";
  out << '\n';
}

inline void header(std::ostream& out, const std::vector<std::string>& cells) {
  row(out, cells);
  out << '|';
  for (std::size_t i = 0; i < cells.size(); ++i) out << " --- |";
  out << '\n';
}

inline std::string join(const nlohmann::json& list) {
  std::string s;
  for (const auto& x : list) s += (s.empty() ? "" : ", ") + x.get<std::string>();
  return s;
}

inline void frequency(std::ostream& out, const ReportEntry& e) {
  const auto& r = e.result;
  out << "Total tokens: " << r.at("total_tokens").dump() << "\n\n";
  header(out, {"Word", "Count", "Per million"});
  for (const auto& [word, count] : r.at("counts").items()) {
    const auto& rates = r.at("rates_per_million");
    row(out, {word, count.dump(), rates.contains(word) ? num(rates.at(word)) : "n/a"});
  }
}

// Queries side by side, one row per neighbor rank.
inline void neighbors(std::ostream& out, const std::vector<ReportEntry>& entries) {
  std::vector<std::string> head{"Rank"};
  std::size_t depth = 0;
  for (const auto& e : entries) {
    head.push_back(e.result.at("query").get<std::string>());
    depth = std::max(depth, e.result.at("neighbors").size());
  }
  header(out, head);
  for (std::size_t k = 0; k < depth; ++k) {
    std::vector<std::string> cells{std::to_string(k + 1)};
    for (const auto& e : entries) {
      const auto& n = e.result.at("neighbors");
      cells.push_back(k < n.size() ? n[k].at("token").get<std::string>() + " (" + num(n[k].at("similarity")) + ")" : "");
    }
    row(out, cells);
  }
}

inline void similarity(std::ostream& out, const ReportEntry& e) {
  const auto& r = e.result;
  if (e.operation == "average_similarity") {
    header(out, {"Word", "Set", "Mean", "Mean |cos|", "Used"});
    row(out, {r.at("word").get<std::string>(), r.at("set").get<std::string>(), num(r.at("mean")), num(r.at("abs_mean")),
              r.at("used").dump()});
    return;
  }
  std::vector<std::string> head{""};
  for (const auto& c : r.at("cols")) head.push_back(c.get<std::string>());
  header(out, head);
  for (std::size_t i = 0; i < r.at("rows").size(); ++i) {
    std::vector<std::string> cells{r.at("rows")[i].get<std::string>()};
    for (const auto& v : r.at("values")[i]) cells.push_back(num(v));
    row(out, cells);
  }
  if (!r.at("missing_rows").empty() || !r.at("missing_cols").empty())
    out << "\nMissing: " << join(r.at("missing_rows")) << (r.at("missing_rows").empty() ? "" : "; ")
        << join(r.at("missing_cols")) << '\n';
}

inline void weat(std::ostream& out, const std::vector<ReportEntry>& entries) {
  header(out, {"Targets", "Attributes", "Effect size d", "Statistic S", "p-value"});
  for (const auto& e : entries) {
    const auto& r = e.result;
    row(out, {r.at("x").get<std::string>() + " vs " + r.at("y").get<std::string>(),
              r.at("a").get<std::string>() + " vs " + r.at("b").get<std::string>(), num(r.at("effect_size_d")),
              num(r.at("statistic_s")), num(r.at("p_value"))});
  }
}

inline void subspace(std::ostream& out, const std::vector<ReportEntry>& entries) {
  header(out, {"Set", "Words", "Explained variance ratio"});
  for (const auto& e : entries) {
    std::string ratios;
    for (const auto& v : e.result.at("explained_variance_ratio")) ratios += (ratios.empty() ? "" : ", ") + num(v);
    row(out, {e.result.at("set_name").get<std::string>(), std::to_string(e.result.at("words").size()), ratios});
  }
  out << '\n';
  header(out, {"Set", "Other set", "Distance"});
  for (const auto& e : entries)
    for (const auto& [other, d] : e.result.at("distances").items())
      row(out, {e.result.at("set_name").get<std::string>(), other, num(d)});
}

inline void probes(std::ostream& out, const ReportEntry& e) {
  if (e.operation == "occupation_probe") {
    const auto& rows = e.result.at("rows");
    std::vector<std::string> head{"Pronoun"};
    if (!rows.empty())
      for (const auto& [g, v] : rows[0].at("group_scores").items()) head.push_back(g);
    header(out, head);
    for (const auto& r : rows) {
      std::vector<std::string> cells{r.at("pronoun").get<std::string>()};
      for (const auto& [g, v] : r.at("group_scores").items()) cells.push_back(num(v));
      row(out, cells);
    }
    return;
  }
  header(out, {"Pronoun pair", "Accuracy", "Mean probability", "Cases", "Unscorable"});
  for (const auto& r : e.result.at("results"))
    row(out, {r.at("pair").get<std::string>(), num(r.at("accuracy")), num(r.at("mean_probability")),
              r.at("case_count").dump(), r.at("unscorable_count").dump()});
}

inline void classifier(std::ostream& out, const ReportEntry& e) {
  out << "Backend: " << e.result.at("backend").get<std::string>() << "\n\n";
  header(out, {"Classifier", "Labels", "Train size", "Test size", "Accuracy on plural set", "Confusion matrix"});
  for (const auto& c : e.result.at("classifiers")) {
    std::string matrix;
    const auto& labels = c.at("matrix_labels");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      matrix += (i ? "; " : "") + labels[i].get<std::string>() + ": ";
      for (std::size_t k = 0; k < labels.size(); ++k)
        matrix += (k ? " " : "") + c.at("confusion_matrix")[i][k].dump();
    }
    row(out, {c.at("name").get<std::string>(), join(c.at("train_labels")), c.at("train_size").dump(),
              c.at("test_size").dump(), num(c.at("accuracy")), matrix});
  }
}

}  // namespace detail

inline std::string human_text(const AuditReport& r) {
  std::ostringstream out;
  out << "# Audit report\n\n";
  out << "- Tool version: " << r.tool_version << '\n';
  out << "- Timestamp: " << r.timestamp << '\n';
  out << "- Config digest: " << r.config_digest << '\n';
  for (const auto& [k, v] : r.inputs) out << "- Input " << k << ": " << v << '\n';
  for (const auto& name : section_names()) {
    auto it = r.sections.find(name);
    if (it == r.sections.end() || it->second.empty()) continue;
    const auto& entries = it->second;
    out << "\n## " << static_cast<char>(std::toupper(name[0])) << name.substr(1) << "\n\n";
    if (name == "neighbors") {
      detail::neighbors(out, entries);
    } else if (name == "weat") {
      detail::weat(out, entries);
    } else if (name == "subspace") {
      detail::subspace(out, entries);
    } else {
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) out << '\n';
        out << "Operation: " << entries[i].operation << ' ' << entries[i].parameters.dump() << "\n\n";
        if (name == "frequency") detail::frequency(out, entries[i]);
        else if (name == "similarity") detail::similarity(out, entries[i]);
        else if (name == "probes") detail::probes(out, entries[i]);
        else detail::classifier(out, entries[i]);
      }
    }
  }
  return out.str();
}

enum class ReportFormat { machine, human };

inline void emit_report(const AuditReport& r, ReportFormat format, const std::filesystem::path& path) {
  if (r.empty()) throw InputError("report has no populated sections");
  const std::string text = format == ReportFormat::machine ? machine_text(r) : human_text(r);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report to " + path.string());
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

// Writes report.json and report.md into dir.
inline void emit_report(const AuditReport& r, const std::filesystem::path& dir) {
  if (r.empty()) throw InputError("report has no populated sections");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  emit_report(r, ReportFormat::machine, dir / "report.json");
  emit_report(r, ReportFormat::human, dir / "report.md");
}

}  // namespace gaudit::report
