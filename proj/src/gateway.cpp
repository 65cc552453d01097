#include "litrev/gateway.hpp"

#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "litrev/errors.hpp"
#include "litrev/text.hpp"

using nlohmann::json;

namespace litrev::gateway {

RateLimiter::RateLimiter(int max_requests, std::chrono::milliseconds window)
    : max_requests_(max_requests), window_(window) {
  if (max_requests_ < 1) throw Error(Errc::InvalidArgument, "requests per window must be >= 1");
}

void RateLimiter::acquire() {
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    while (!sent_.empty() && sent_.front() <= now - window_) sent_.pop_front();
    if (static_cast<int>(sent_.size()) < max_requests_) {
      sent_.push_back(now);
      ++total_;
      return;
    }
    cv_.wait_until(lock, sent_.front() + window_);
  }
}

uint64_t RateLimiter::total_sends() const {
  std::unique_lock lock(mu_);
  return total_;
}

HttpClient::HttpClient(std::string base_url, std::string auth_env_var, int read_timeout_s)
    : base_url_(std::move(base_url)),
      auth_env_var_(std::move(auth_env_var)),
      read_timeout_s_(read_timeout_s) {}

std::string HttpClient::auth_header() const {
  if (auth_env_var_.empty()) return {};
  const char* value = std::getenv(auth_env_var_.c_str());
  if (!value || !*value)
    throw Error(Errc::AuthError, "credential env var not set: " + auth_env_var_);
  return std::string("Bearer ") + value;
}

namespace {

HttpResponse to_response(const httplib::Result& res) {
  if (!res) {
    HttpResponse r;
    r.status = -1;
    r.body = httplib::to_string(res.error());
    return r;
  }
  return HttpResponse{res->status, res->body};
}

}  // namespace

HttpResponse HttpClient::post_json(const std::string& path, const std::string& body) const {
  httplib::Client cli(base_url_);
  cli.set_connection_timeout(10, 0);
  cli.set_read_timeout(read_timeout_s_, 0);
  httplib::Headers headers;
  const std::string auth = auth_header();
  if (!auth.empty()) headers.emplace("Authorization", auth);
  return to_response(cli.Post(path, headers, body, "application/json"));
}

HttpResponse HttpClient::get(const std::string& path_and_query) const {
  httplib::Client cli(base_url_);
  cli.set_connection_timeout(10, 0);
  cli.set_read_timeout(read_timeout_s_, 0);
  httplib::Headers headers;
  const std::string auth = auth_header();
  if (!auth.empty()) headers.emplace("Authorization", auth);
  return to_response(cli.Get(path_and_query, headers));
}

LlmClient::LlmClient(ModelEndpoint endpoint, std::shared_ptr<CacheStore> cache,
                     std::chrono::milliseconds rate_window)
    : endpoint_(std::move(endpoint)),
      cache_(std::move(cache)),
      http_(endpoint_.base_url, endpoint_.auth_env_var, endpoint_.read_timeout_s),
      limiter_(endpoint_.requests_per_minute, rate_window) {
  if (endpoint_.name.empty()) throw Error(Errc::InvalidArgument, "endpoint name is empty");
}

std::string LlmClient::fetch_body_with_retry(const std::string& path,
                                             const std::string& payload) {
  int attempt = 0;
  for (;;) {
    limiter_.acquire();
    const HttpResponse res = http_.post_json(path, payload);
    if (res.status == 200) return res.body;
    if (res.status == 401 || res.status == 403)
      throw Error(Errc::AuthError, "HTTP " + std::to_string(res.status) + " from " +
                                       endpoint_.name);
    const bool retryable = res.status == 429 || res.status >= 500 || res.status < 0;
    if (!retryable)
      throw Error(Errc::TransportError,
                  "HTTP " + std::to_string(res.status) + " from " + endpoint_.name);
    if (attempt >= endpoint_.max_retries) {
      if (res.status == 429)
        throw Error(Errc::RateLimited, "retries exhausted against " + endpoint_.name);
      throw Error(Errc::TransportError, "retries exhausted against " + endpoint_.name +
                                            " (last: " + std::to_string(res.status) + " " +
                                            res.body + ")");
    }
    const auto delay =
        std::chrono::milliseconds(static_cast<long>(endpoint_.backoff_initial_ms) << attempt);
    std::this_thread::sleep_for(delay);
    ++attempt;
  }
}

std::string LlmClient::complete_text(const std::string& prompt_text) {
  json material;
  material["endpoint"] = endpoint_.name;
  material["op"] = "chat";
  material["temperature"] = 0.0;
  material["prompt"] = prompt_text;

  const CompletionRecord rec = cache_->get_or_fetch(material.dump(), [&]() {
    json payload;
    payload["model"] = endpoint_.name;
    payload["messages"] = json::array({{{"role", "user"}, {"content", prompt_text}}});
    payload["temperature"] = 0.0;
    const std::string body = fetch_body_with_retry("/v1/chat/completions", payload.dump());

    json j = json::parse(body, nullptr, false);
    if (j.is_discarded())
      throw Error(Errc::TransportError, "malformed completion body from " + endpoint_.name);
    std::string content;
    try {
      content = j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
      throw Error(Errc::TransportError, "unexpected completion schema from " + endpoint_.name);
    }
    if (text::trim(content).empty())
      throw Error(Errc::EmptyResponse, "empty completion from " + endpoint_.name);

    FetchResult out;
    out.raw_output = std::move(content);
    if (j.contains("usage")) {
      TokenUsage u;
      u.prompt_tokens = j["usage"].value("prompt_tokens", 0L);
      u.completion_tokens = j["usage"].value("completion_tokens", 0L);
      out.token_usage = u;
    }
    return out;
  });
  return rec.raw_output;
}

std::string LlmClient::complete(const taskgen::PromptInstance& prompt) {
  return complete_text(prompt.prompt_text);
}

std::vector<std::vector<double>> LlmClient::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) throw Error(Errc::InvalidArgument, "embed requires non-empty input");
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  size_t expected_dim = 0;
  for (const auto& text_in : texts) {
    json material;
    material["endpoint"] = endpoint_.name;
    material["op"] = "embed";
    material["input"] = text_in;

    const CompletionRecord rec = cache_->get_or_fetch(material.dump(), [&]() {
      json payload;
      payload["model"] = endpoint_.name;
      payload["input"] = text_in;
      FetchResult res;
      res.raw_output = fetch_body_with_retry("/v1/embeddings", payload.dump());
      return res;
    });

    json j = json::parse(rec.raw_output, nullptr, false);
    if (j.is_discarded() || !j.contains("data") || !j["data"].is_array() || j["data"].empty())
      throw Error(Errc::TransportError, "unexpected embedding schema from " + endpoint_.name);
    std::vector<double> vec = j["data"][0].value("embedding", std::vector<double>{});
    if (vec.empty())
      throw Error(Errc::EmptyResponse, "empty embedding from " + endpoint_.name);
    if (expected_dim == 0) expected_dim = vec.size();
    if (vec.size() != expected_dim)
      throw Error(Errc::TransportError, "embedding dimension mismatch from " + endpoint_.name);
    out.push_back(std::move(vec));
  }
  return out;
}

namespace {

constexpr const char* kJudgePromptVersion = "entail-judge-v1";

std::optional<int> map_judge_reply(const std::string& reply) {
  const std::string t = text::to_lower_ascii(text::trim(reply));
  if (t.empty()) return std::nullopt;
  if (t[0] == '1') return 1;
  if (t[0] == '0') return 0;
  if (t.rfind("yes", 0) == 0) return 1;
  if (t.rfind("no", 0) == 0) return 0;
  return std::nullopt;
}

class LlmJudge final : public EntailmentJudge {
public:
  LlmJudge(const ModelEndpoint& endpoint, std::shared_ptr<CacheStore> cache,
           std::chrono::milliseconds window)
      : client_(endpoint, std::move(cache), window), name_(endpoint.name) {}

  int judge(const std::string& premise, const std::string& hypothesis) override {
    if (premise.empty() || hypothesis.empty())
      throw Error(Errc::InvalidArgument, "judge_entailment requires non-empty texts");
    const std::string prompt = std::string(kJudgePromptVersion) + "\nPremise: " + premise +
                               "\nHypothesis: " + hypothesis +
                               "\nDoes the premise entail the hypothesis? Answer with exactly "
                               "one character: 1 if the premise entails the hypothesis, 0 "
                               "otherwise.";
    if (auto v = map_judge_reply(client_.complete_text(prompt))) return *v;
    const std::string reprompt =
        prompt + "\nYour previous reply was not a valid answer. Reply with the single "
                 "character 1 or 0 and nothing else.";
    if (auto v = map_judge_reply(client_.complete_text(reprompt))) return *v;
    throw Error(Errc::JudgeFormatError, "judge " + name_ + " reply not mappable to {0,1}");
  }

  const std::string& name() const override { return name_; }

private:
  LlmClient client_;
  std::string name_;
};

class NliJudge final : public EntailmentJudge {
public:
  NliJudge(ModelEndpoint endpoint, std::shared_ptr<CacheStore> cache,
           std::chrono::milliseconds window)
      : endpoint_(std::move(endpoint)),
        cache_(std::move(cache)),
        http_(endpoint_.base_url, endpoint_.auth_env_var, endpoint_.read_timeout_s),
        limiter_(endpoint_.requests_per_minute, window) {}

  int judge(const std::string& premise, const std::string& hypothesis) override {
    if (premise.empty() || hypothesis.empty())
      throw Error(Errc::InvalidArgument, "judge_entailment requires non-empty texts");
    json material;
    material["endpoint"] = endpoint_.name;
    material["op"] = "nli";
    material["premise"] = premise;
    material["hypothesis"] = hypothesis;

    const CompletionRecord rec = cache_->get_or_fetch(material.dump(), [&]() {
      json payload;
      payload["model"] = endpoint_.name;
      payload["premise"] = premise;
      payload["hypothesis"] = hypothesis;
      int attempt = 0;
      for (;;) {
        limiter_.acquire();
        const HttpResponse res = http_.post_json("/nli", payload.dump());
        if (res.status == 200) return FetchResult{res.body, std::nullopt};
        if (res.status == 401 || res.status == 403)
          throw Error(Errc::AuthError, "HTTP " + std::to_string(res.status));
        if (attempt >= endpoint_.max_retries)
          throw Error(res.status == 429 ? Errc::RateLimited : Errc::TransportError,
                      "retries exhausted against " + endpoint_.name);
        std::this_thread::sleep_for(std::chrono::milliseconds(
            static_cast<long>(endpoint_.backoff_initial_ms) << attempt));
        ++attempt;
      }
    });

    json j = json::parse(rec.raw_output, nullptr, false);
    if (!j.is_discarded()) {
      if (j.contains("entails") && j["entails"].is_boolean())
        return j["entails"].get<bool>() ? 1 : 0;
      if (j.contains("label") && j["label"].is_string())
        return text::to_lower_ascii(j["label"].get<std::string>()) == "entailment" ? 1 : 0;
      if (j.contains("score") && j["score"].is_number())
        return j["score"].get<double>() >= 0.5 ? 1 : 0;
    }
    throw Error(Errc::JudgeFormatError, "NLI reply from " + endpoint_.name + " not mappable");
  }

  const std::string& name() const override { return endpoint_.name; }

private:
  ModelEndpoint endpoint_;
  std::shared_ptr<CacheStore> cache_;
  HttpClient http_;
  RateLimiter limiter_;
};

}  // namespace

std::unique_ptr<EntailmentJudge> make_judge(const ModelEndpoint& endpoint,
                                            std::shared_ptr<CacheStore> cache,
                                            std::chrono::milliseconds rate_window) {
  if (endpoint.kind == "llm") return std::make_unique<LlmJudge>(endpoint, std::move(cache), rate_window);
  return std::make_unique<NliJudge>(endpoint, std::move(cache), rate_window);
}

}  // namespace litrev::gateway
