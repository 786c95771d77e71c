#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gaudit/error.hpp"

// Wire records exchanged with the model-probe service. Field names are part
// of the protocol; see docs in README.md.
namespace gaudit::service {

struct ScoreRequest {
  std::string text;  // exactly one "[MASK]"
  std::vector<std::string> candidates;
  std::optional<std::size_t> top_k;

  friend bool operator==(const ScoreRequest&, const ScoreRequest&) = default;
};

struct ScoreResponse {
  std::map<std::string, double> candidate_probs;
  std::vector<std::pair<std::string, double>> top_k;
  std::vector<std::string> unscorable;

  friend bool operator==(const ScoreResponse&, const ScoreResponse&) = default;
};

struct TrainRequest {
  std::string dataset_path;
  std::vector<std::string> labels;
  int epochs = 3;
  std::uint64_t seed = 0;
  std::string run_id;
};

struct EvalRequest {
  std::string run_id;
  std::string dataset_path;
};

struct EvalResponse {
  double accuracy = 0.0;
  std::vector<std::string> labels;                        // row/column order of the matrix
  std::vector<std::vector<std::uint64_t>> confusion_matrix;  // [true][predicted]
  std::vector<std::string> predictions;                   // one label per example, dataset order
};

inline nlohmann::json to_json(const ScoreRequest& r) {
  nlohmann::json j{{"text", r.text}, {"candidates", r.candidates}};
  if (r.top_k) j["top_k"] = *r.top_k;
  return j;
}

inline ScoreRequest score_request_from_json(const nlohmann::json& j) {
  ScoreRequest r;
  r.text = j.at("text").get<std::string>();
  r.candidates = j.at("candidates").get<std::vector<std::string>>();
  if (j.contains("top_k") && !j.at("top_k").is_null()) r.top_k = j.at("top_k").get<std::size_t>();
  return r;
}

inline nlohmann::json to_json(const ScoreResponse& r) {
  nlohmann::json top = nlohmann::json::array();
  for (const auto& [tok, p] : r.top_k) top.push_back({tok, p});
  return {{"candidate_probs", r.candidate_probs}, {"top_k", top}, {"unscorable", r.unscorable}};
}

inline void check_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) throw BackendError(what + " has probability " + std::to_string(p) + " outside [0, 1]");
}

inline ScoreResponse score_response_from_json(const nlohmann::json& j) {
  ScoreResponse r;
  r.candidate_probs = j.at("candidate_probs").get<std::map<std::string, double>>();
  for (const auto& [tok, p] : r.candidate_probs) check_probability(p, "candidate '" + tok + "'");
  if (j.contains("top_k"))
    for (const auto& e : j.at("top_k")) {
      r.top_k.emplace_back(e.at(0).get<std::string>(), e.at(1).get<double>());
      check_probability(r.top_k.back().second, "top-k token '" + r.top_k.back().first + "'");
    }
  if (j.contains("unscorable")) r.unscorable = j.at("unscorable").get<std::vector<std::string>>();
  return r;
}

inline nlohmann::json to_json(const TrainRequest& r) {
  return {{"dataset_path", r.dataset_path}, {"labels", r.labels}, {"epochs", r.epochs}, {"seed", r.seed},
          {"run_id", r.run_id}};
}

inline nlohmann::json to_json(const EvalRequest& r) { return {{"run_id", r.run_id}, {"dataset_path", r.dataset_path}}; }

inline nlohmann::json to_json(const EvalResponse& r) {
  return {{"accuracy", r.accuracy}, {"labels", r.labels}, {"confusion_matrix", r.confusion_matrix},
          {"predictions", r.predictions}};
}

// Parses and checks an evaluation response: the matrix is square over
// `labels`, its entries sum to the number of predictions, and accuracy
// agrees with its diagonal.
inline EvalResponse eval_response_from_json(const nlohmann::json& j) {
  EvalResponse r;
  r.accuracy = j.at("accuracy").get<double>();
  r.labels = j.at("labels").get<std::vector<std::string>>();
  r.confusion_matrix = j.at("confusion_matrix").get<std::vector<std::vector<std::uint64_t>>>();
  r.predictions = j.at("predictions").get<std::vector<std::string>>();
  if (r.confusion_matrix.size() != r.labels.size()) throw BackendError("confusion matrix does not match label count");
  std::uint64_t total = 0, diag = 0;
  for (std::size_t i = 0; i < r.confusion_matrix.size(); ++i) {
    if (r.confusion_matrix[i].size() != r.labels.size()) throw BackendError("confusion matrix is not square");
    for (std::size_t k = 0; k < r.labels.size(); ++k) total += r.confusion_matrix[i][k];
    diag += r.confusion_matrix[i][i];
  }
  if (total != r.predictions.size())
    throw BackendError("confusion matrix counts " + std::to_string(total) + " examples but " +
                       std::to_string(r.predictions.size()) + " predictions were returned");
  const double expected = total ? static_cast<double>(diag) / static_cast<double>(total) : 0.0;
  if (std::abs(expected - r.accuracy) > 1e-9) throw BackendError("reported accuracy disagrees with the confusion matrix");
  return r;
}

}  // namespace gaudit::service
