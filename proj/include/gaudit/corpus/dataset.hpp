#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaudit/corpus/mining.hpp"
#include "gaudit/util/rng.hpp"

namespace gaudit::corpus {

struct DatasetRecord {
  std::string doc_id;
  std::string sentence_prev;
  std::string sentence_target;
  std::string masked_target;
  std::string pronoun;
  PronounLabel label = PronounLabel::they_plural;
  std::string split;  // "train" or "test"

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

// Balanced binary classification data: both splits hold the same number of
// records per class.
struct ClassifierDataset {
  std::vector<DatasetRecord> train;
  std::vector<DatasetRecord> test;

  std::size_t size() const { return train.size() + test.size(); }
};

struct DatasetOptions {
  double train_fraction = 0.8;
};

inline DatasetRecord to_record(const MinedPair& p, std::string split) {
  return {p.doc_id, p.sentence_prev, p.sentence_target, p.masked_target, p.pronoun, p.label, std::move(split)};
}

// Keeps min(|pos|, |neg|) pairs of each class (a seeded random subset of the
// larger side), then splits each class by train_fraction and shuffles both
// splits. Identical inputs and seed give identical output.
inline ClassifierDataset export_classifier_dataset(std::vector<MinedPair> pos, std::vector<MinedPair> neg,
                                                   std::uint64_t seed, const DatasetOptions& opts = {}) {
  if (pos.empty() || neg.empty()) throw InputError("classifier dataset needs non-empty positive and negative sets");
  if (!(opts.train_fraction >= 0.0 && opts.train_fraction <= 1.0))
    throw InputError("train fraction must lie in [0, 1]");
  std::set<PronounLabel> pos_labels;
  for (const auto& p : pos) pos_labels.insert(p.label);
  for (const auto& n : neg)
    if (pos_labels.contains(n.label))
      throw InputError("positive and negative sets share the label " + std::string(to_string(n.label)));

  std::mt19937_64 rng(seed);
  util::shuffle(pos, rng);
  util::shuffle(neg, rng);
  const std::size_t per_class = std::min(pos.size(), neg.size());
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(per_class) * opts.train_fraction));

  ClassifierDataset out;
  for (const auto* side : {&pos, &neg})
    for (std::size_t i = 0; i < per_class; ++i)
      (i < n_train ? out.train : out.test).push_back(to_record((*side)[i], i < n_train ? "train" : "test"));
  util::shuffle(out.train, rng);
  util::shuffle(out.test, rng);
  return out;
}

inline nlohmann::ordered_json to_json(const DatasetRecord& r) {
  return nlohmann::ordered_json{{"doc_id", r.doc_id},
                                {"sentence_prev", r.sentence_prev},
                                {"sentence_target", r.sentence_target},
                                {"masked_target", r.masked_target},
                                {"pronoun", r.pronoun},
                                {"label", to_string(r.label)},
                                {"split", r.split}};
}

inline DatasetRecord record_from_json(const nlohmann::json& j) {
  DatasetRecord r;
  r.doc_id = j.at("doc_id").get<std::string>();
  r.sentence_prev = j.at("sentence_prev").get<std::string>();
  r.sentence_target = j.at("sentence_target").get<std::string>();
  r.masked_target = j.at("masked_target").get<std::string>();
  r.pronoun = j.at("pronoun").get<std::string>();
  r.label = parse_label(j.at("label").get<std::string>());
  r.split = j.at("split").get<std::string>();
  if (r.split != "train" && r.split != "test") throw InputError("split must be 'train' or 'test'");
  if (detail::count_occurrences(r.masked_target, kMask) != 1)
    throw InputError("masked_target must contain exactly one [MASK]");
  return r;
}

inline void write_records(std::ostream& out, const std::vector<DatasetRecord>& records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

inline void write_dataset(std::ostream& out, const ClassifierDataset& ds) {
  write_records(out, ds.train);
  write_records(out, ds.test);
}

inline void write_dataset(const std::filesystem::path& path, const ClassifierDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_dataset(out, ds);
}

inline ClassifierDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  ClassifierDataset ds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto r = record_from_json(nlohmann::json::parse(line));
      (r.split == "train" ? ds.train : ds.test).push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string(), lineno, e.what());
    } catch (const InputError& e) {
      throw FormatError(path.string(), lineno, e.what());
    }
  }
  return ds;
}

}  // namespace gaudit::corpus
