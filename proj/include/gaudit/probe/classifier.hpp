#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gaudit/corpus/dataset.hpp"
#include "gaudit/service/client.hpp"
#include "gaudit/service/protocol.hpp"

namespace gaudit::probe {

class ClassifierBackend {
 public:
  virtual ~ClassifierBackend() = default;
  // Training under an existing run_id continues from that run's weights.
  virtual std::string train(const service::TrainRequest& req) const = 0;
  virtual service::EvalResponse eval(const service::EvalRequest& req) const = 0;
  virtual std::string identity() const = 0;
};

class ServiceClassifierBackend final : public ClassifierBackend {
 public:
  explicit ServiceClassifierBackend(service::ServiceClient client) : client_(std::move(client)) {}

  std::string train(const service::TrainRequest& req) const override { return client_.train(req); }
  service::EvalResponse eval(const service::EvalRequest& req) const override { return client_.eval(req); }
  std::string identity() const override { return client_.identity(); }

 private:
  service::ServiceClient client_;
};

struct ClassifierSpec {
  std::string name;  // "C1", "C2", ...
  corpus::ClassifierDataset dataset;
};

// The warm-up set is passed through to the backend as is; its two labels
// map onto the (singular, plural) positions of every classifier.
struct WarmupSpec {
  std::filesystem::path dataset_path;
  std::vector<std::string> labels{"i", "we"};
};

struct ExperimentOptions {
  std::filesystem::path work_dir;
  int epochs = 3;
  std::uint64_t seed = 0;
  std::optional<WarmupSpec> warmup;
};

struct ClassifierOutcome {
  std::string name;
  std::string run_id;
  std::vector<std::string> train_labels;  // (singular, plural)
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::size_t predicted_plural = 0;
  double accuracy = 0.0;
  std::vector<std::string> matrix_labels;
  std::vector<std::vector<std::uint64_t>> confusion_matrix;  // [true][predicted]
};

struct ExperimentReport {
  std::string backend;
  std::vector<ClassifierOutcome> classifiers;
};

namespace detail {

inline std::vector<std::string> train_labels(const ClassifierSpec& spec) {
  if (spec.dataset.train.empty()) throw InputError(spec.name + ": training split is empty");
  std::set<corpus::PronounLabel> seen;
  for (const auto* split : {&spec.dataset.train, &spec.dataset.test})
    for (const auto& r : *split) seen.insert(r.label);
  if (seen.size() != 2 || !seen.contains(corpus::PronounLabel::they_plural))
    throw InputError(spec.name + ": dataset must hold exactly two labels, one of them they_plural");
  seen.erase(corpus::PronounLabel::they_plural);
  return {std::string(corpus::to_string(*seen.begin())), std::string(corpus::to_string(corpus::PronounLabel::they_plural))};
}

inline void write_file(const std::filesystem::path& path, const std::vector<corpus::DatasetRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  corpus::write_records(out, records);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace detail

// Trains each classifier (optionally warm-started on the i/we set under the
// same run id) and evaluates it on the all-plural test set. On that set the
// accuracy is the fraction of examples predicted they_plural; the backend's
// reported accuracy must agree with its own predictions.
inline ExperimentReport run_classifier_experiment(const std::vector<ClassifierSpec>& classifiers,
                                                  const std::vector<corpus::DatasetRecord>& test_plural,
                                                  const ClassifierBackend& backend, const ExperimentOptions& opts) {
  if (classifiers.empty()) throw InputError("no classifiers configured");
  if (test_plural.empty()) throw InputError("plural test set is empty");
  for (const auto& r : test_plural)
    if (r.label != corpus::PronounLabel::they_plural)
      throw InputError("plural test set holds a record labelled " + std::string(corpus::to_string(r.label)));
  std::set<std::string> names;
  for (const auto& c : classifiers)
    if (c.name.empty() || !names.insert(c.name).second)
      throw InputError("classifier names must be non-empty and unique");

  std::error_code ec;
  std::filesystem::create_directories(opts.work_dir, ec);
  if (ec) throw IoError("cannot create work directory " + opts.work_dir.string() + ": " + ec.message());
  const auto test_path = opts.work_dir / "test_plural.jsonl";
  detail::write_file(test_path, test_plural);

  ExperimentReport report{backend.identity(), {}};
  for (const auto& spec : classifiers) {
    ClassifierOutcome out;
    out.name = spec.name;
    out.train_labels = detail::train_labels(spec);
    out.train_size = spec.dataset.train.size();
    const auto train_path = opts.work_dir / (spec.name + "_train.jsonl");
    detail::write_file(train_path, spec.dataset.train);

    std::string run_id = spec.name;
    if (opts.warmup)
      run_id = backend.train({opts.warmup->dataset_path.string(), opts.warmup->labels, opts.epochs, opts.seed, run_id});
    out.run_id = backend.train({train_path.string(), out.train_labels, opts.epochs, opts.seed, run_id});

    auto res = backend.eval({out.run_id, test_path.string()});
    if (res.predictions.size() != test_plural.size())
      throw BackendError(spec.name + ": backend returned " + std::to_string(res.predictions.size()) +
                         " predictions for " + std::to_string(test_plural.size()) + " test examples");
    for (const auto& p : res.predictions)
      if (p == out.train_labels[1]) ++out.predicted_plural;
    out.test_size = test_plural.size();
    out.accuracy = static_cast<double>(out.predicted_plural) / static_cast<double>(out.test_size);
    if (std::abs(out.accuracy - res.accuracy) > 1e-9)
      throw BackendError(spec.name + ": reported accuracy " + std::to_string(res.accuracy) +
                         " disagrees with its predictions (" + std::to_string(out.accuracy) + ")");
    out.matrix_labels = std::move(res.labels);
    out.confusion_matrix = std::move(res.confusion_matrix);
    report.classifiers.push_back(std::move(out));
  }
  return report;
}

}  // namespace gaudit::probe
