#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "gaudit/service/client.hpp"
#include "gaudit/service/protocol.hpp"
#include "gaudit/util/sha256.hpp"

namespace gaudit::probe {

// Anything that can score candidate tokens at the mask of a prompt.
class ScoringBackend {
 public:
  virtual ~ScoringBackend() = default;
  virtual service::ScoreResponse score(const service::ScoreRequest& req) const = 0;
  virtual std::string identity() const = 0;
};

class ServiceScoringBackend final : public ScoringBackend {
 public:
  explicit ServiceScoringBackend(service::ServiceClient client) : client_(std::move(client)) {}

  service::ScoreResponse score(const service::ScoreRequest& req) const override { return client_.score_mask(req); }
  std::string identity() const override { return client_.identity(); }

 private:
  service::ServiceClient client_;
};

inline std::string prompt_hash(std::string_view prompt) { return util::sha256_hex(prompt); }

// Replays recorded responses keyed by the SHA-256 of the prompt text. Each
// line of a fixture file is one record:
//
//   {"prompt_sha256": "...", "prompt": "...",            // prompt optional
//    "candidate_probs": {"he": 0.7, ...}, "top_k": [["he", 0.7], ...],
//    "unscorable": ["xe"]}
//
// Requested candidates the record does not score are reported unscorable.
class FixtureBackend final : public ScoringBackend {
 public:
  FixtureBackend() = default;

  static FixtureBackend load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open fixture file " + path.string());
    FixtureBackend f;
    f.source_ = "fixture:" + util::sha256_file(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        auto j = nlohmann::json::parse(line);
        std::string key = j.contains("prompt_sha256") ? j.at("prompt_sha256").get<std::string>()
                                                       : prompt_hash(j.at("prompt").get<std::string>());
        if (!f.records_.emplace(std::move(key), service::score_response_from_json(j)).second)
          throw FormatError(path.string(), lineno, "duplicate prompt hash");
      } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string(), lineno, e.what());
      } catch (const BackendError& e) {
        throw FormatError(path.string(), lineno, e.what());
      }
    }
    return f;
  }

  void add(std::string_view prompt, service::ScoreResponse response) {
    records_.insert_or_assign(prompt_hash(prompt), std::move(response));
  }

  std::size_t size() const { return records_.size(); }

  service::ScoreResponse score(const service::ScoreRequest& req) const override {
    auto it = records_.find(prompt_hash(req.text));
    if (it == records_.end()) throw BackendError("fixture has no record for prompt: " + req.text);
    const auto& rec = it->second;
    service::ScoreResponse out;
    const std::set<std::string> flagged(rec.unscorable.begin(), rec.unscorable.end());
    for (const auto& c : req.candidates) {
      auto p = rec.candidate_probs.find(c);
      if (p != rec.candidate_probs.end() && !flagged.contains(c))
        out.candidate_probs.emplace(c, p->second);
      else
        out.unscorable.push_back(c);
    }
    out.top_k = rec.top_k;
    if (req.top_k && out.top_k.size() > *req.top_k) out.top_k.resize(*req.top_k);
    return out;
  }

  std::string identity() const override { return source_.empty() ? "fixture:in-memory" : source_; }

 private:
  std::map<std::string, service::ScoreResponse> records_;
  std::string source_;
};

inline nlohmann::ordered_json fixture_record(std::string_view prompt, const service::ScoreResponse& r) {
  nlohmann::ordered_json j;
  j["prompt_sha256"] = prompt_hash(prompt);
  j["prompt"] = prompt;
  j["candidate_probs"] = r.candidate_probs;
  nlohmann::json top = nlohmann::json::array();
  for (const auto& [tok, p] : r.top_k) top.push_back({tok, p});
  j["top_k"] = top;
  j["unscorable"] = r.unscorable;
  return j;
}

// Passes requests through to another backend and keeps every response, so a
// live run can be saved as a fixture for offline replay.
class RecordingBackend final : public ScoringBackend {
 public:
  explicit RecordingBackend(const ScoringBackend& inner) : inner_(inner) {}

  service::ScoreResponse score(const service::ScoreRequest& req) const override {
    auto r = inner_.score(req);
    std::lock_guard lock(mutex_);
    recorded_.insert_or_assign(req.text, r);
    return r;
  }

  std::string identity() const override { return inner_.identity(); }

  void write(std::ostream& out) const {
    std::lock_guard lock(mutex_);
    for (const auto& [prompt, r] : recorded_) out << fixture_record(prompt, r).dump() << '\n';
  }

 private:
  const ScoringBackend& inner_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, service::ScoreResponse> recorded_;
};

// "fixture:PATH" or an http(s) URL.
inline std::unique_ptr<ScoringBackend> make_scoring_backend(const std::string& spec,
                                                            service::ClientOptions opts = {}) {
  if (spec.rfind("fixture:", 0) == 0)
    return std::make_unique<FixtureBackend>(FixtureBackend::load(spec.substr(8)));
  return std::make_unique<ServiceScoringBackend>(service::ServiceClient(spec, opts));
}

}  // namespace gaudit::probe
