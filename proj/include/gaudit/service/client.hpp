#pragma once

#include <chrono>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gaudit/corpus/persons.hpp"
#include "gaudit/error.hpp"
#include "gaudit/service/protocol.hpp"

namespace gaudit::service {

struct ClientOptions {
  int max_attempts = 3;
  std::chrono::milliseconds backoff{100};  // doubled after every failed attempt
  std::chrono::seconds timeout{60};
};

// JSON-over-HTTP client for the model-probe service. Transport failures and
// 5xx answers are retried up to max_attempts; 4xx answers fail immediately
// with ProtocolError. A fresh connection is used per call, so one client may
// be shared by concurrent callers.
class ServiceClient {
 public:
  explicit ServiceClient(std::string base_url, ClientOptions opts = {})
      : base_url_(std::move(base_url)), opts_(opts) {
    while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
    if (base_url_.rfind("http://", 0) != 0 && base_url_.rfind("https://", 0) != 0)
      throw InputError("service URL must start with http:// or https://, got '" + base_url_ + "'");
  }

  const std::string& base_url() const { return base_url_; }

  nlohmann::json post(const std::string& path, const nlohmann::json& body) const {
    return call(path, [&](httplib::Client& c) { return c.Post(path, body.dump(), "application/json"); });
  }

  nlohmann::json get(const std::string& path) const {
    return call(path, [&](httplib::Client& c) { return c.Get(path); });
  }

  ScoreResponse score_mask(const ScoreRequest& req) const {
    return parse(score_response_from_json, post("/score_mask", to_json(req)), "/score_mask");
  }

  std::string train(const TrainRequest& req) const {
    auto j = post("/classify/train", to_json(req));
    return parse([](const nlohmann::json& x) { return x.at("run_id").get<std::string>(); }, j, "/classify/train");
  }

  EvalResponse eval(const EvalRequest& req) const {
    return parse(eval_response_from_json, post("/classify/eval", to_json(req)), "/classify/eval");
  }

  std::vector<corpus::ByteSpan> ner(const std::string& text) const {
    auto j = post("/ner", {{"text", text}});
    return parse(
        [&](const nlohmann::json& x) {
          std::vector<corpus::ByteSpan> spans;
          for (const auto& s : x.at("spans")) {
            corpus::ByteSpan span{s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()};
            if (span.begin >= span.end || span.end > text.size())
              throw BackendError("/ner returned an out-of-bounds span");
            spans.push_back(span);
          }
          return spans;
        },
        j, "/ner");
  }

  // Model identity reported by the service, pinned into audit reports.
  std::string identity() const {
    auto j = get("/model_info");
    return base_url_ + " " + j.dump();
  }

 private:
  template <typename Parse>
  static auto parse(Parse&& fn, const nlohmann::json& j, const std::string& path) -> decltype(fn(j)) {
    try {
      return fn(j);
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(path + ": malformed response: " + e.what());
    }
  }

  template <typename Send>
  nlohmann::json call(const std::string& path, Send&& send) const {
    std::string last_error;
    auto delay = opts_.backoff;
    for (int attempt = 1; attempt <= opts_.max_attempts; ++attempt) {
      httplib::Client client(base_url_);
      client.set_connection_timeout(opts_.timeout);
      client.set_read_timeout(opts_.timeout);
      client.set_write_timeout(opts_.timeout);
      auto res = send(client);
      if (!res) {
        last_error = httplib::to_string(res.error());
      } else if (res->status >= 400 && res->status < 500) {
        throw ProtocolError(res->status, path + ": " + res->body);
      } else if (res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
      } else {
        try {
          return nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
          throw BackendError(path + ": response is not JSON: " + e.what());
        }
      }
      if (attempt < opts_.max_attempts) {
        std::this_thread::sleep_for(delay);
        delay *= 2;
      }
    }
    throw BackendError(base_url_ + path + " failed after " + std::to_string(opts_.max_attempts) +
                       " attempts: " + last_error);
  }

  std::string base_url_;
  ClientOptions opts_;
};

// Person detection delegated to the service's tagging endpoint.
class ServicePersonDetector final : public corpus::PersonDetector {
 public:
  explicit ServicePersonDetector(ServiceClient client) : client_(std::move(client)) {}

  std::vector<corpus::ByteSpan> mentions(std::string_view sentence) const override {
    return client_.ner(std::string(sentence));
  }

  std::string identity() const override { return "service:" + client_.base_url() + "/ner"; }

 private:
  ServiceClient client_;
};

}  // namespace gaudit::service
