#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "litrev/taskgen.hpp"

namespace litrev::gateway {

struct ModelEndpoint {
  std::string name;
  std::string base_url;
  std::string auth_env_var;  // credentials come only from the environment
  int requests_per_minute = 60;
  int max_retries = 3;
  std::string kind;  // judges: "llm" or "nli"
  int backoff_initial_ms = 250;
  int read_timeout_s = 120;
};

struct TokenUsage {
  long prompt_tokens = 0;
  long completion_tokens = 0;
};

struct CompletionRecord {
  std::string cache_key;
  std::string raw_output;
  long long created_unix = 0;
  std::optional<TokenUsage> token_usage;
};

std::string sha256_hex(std::string_view data);

struct FetchResult {
  std::string raw_output;
  std::optional<TokenUsage> token_usage;
};

// Content-addressed on-disk store, one file per key digest, no eviction.
// In-flight requests are deduplicated so a key is fetched at most once per
// process; concurrent callers block on the same future.
class CacheStore {
public:
  explicit CacheStore(std::string dir);  // empty dir: memory-only

  CompletionRecord get_or_fetch(const std::string& key_material,
                                const std::function<FetchResult()>& fetch);

  uint64_t network_fetches() const;

private:
  std::optional<CompletionRecord> disk_lookup(const std::string& key) const;
  void disk_store(const CompletionRecord& rec, const std::string& key_material) const;

  std::string dir_;
  mutable std::mutex mu_;
  std::map<std::string, CompletionRecord> mem_;
  std::map<std::string, std::shared_future<CompletionRecord>> inflight_;
  uint64_t fetches_ = 0;
};

// Sliding-window limiter: at most max_requests acquisitions in any window.
class RateLimiter {
public:
  RateLimiter(int max_requests, std::chrono::milliseconds window);
  void acquire();
  uint64_t total_sends() const;

private:
  int max_requests_;
  std::chrono::milliseconds window_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::chrono::steady_clock::time_point> sent_;
  uint64_t total_ = 0;
};

struct HttpResponse {
  int status = 0;  // <0: transport failure, message in body
  std::string body;
};

// One connection per request; instances are freely shareable across threads.
class HttpClient {
public:
  HttpClient(std::string base_url, std::string auth_env_var, int read_timeout_s);
  HttpResponse post_json(const std::string& path, const std::string& body) const;
  HttpResponse get(const std::string& path_and_query) const;

private:
  std::string auth_header() const;
  std::string base_url_;
  std::string auth_env_var_;
  int read_timeout_s_;
};

inline constexpr std::chrono::milliseconds kDefaultRateWindow{60000};

// Chat-completion and embedding client over the de-facto open HTTP schema.
// All results go through the cache; sampling is pinned to temperature 0.
class LlmClient {
public:
  LlmClient(ModelEndpoint endpoint, std::shared_ptr<CacheStore> cache,
            std::chrono::milliseconds rate_window = kDefaultRateWindow);

  std::string complete(const taskgen::PromptInstance& prompt);
  std::string complete_text(const std::string& prompt_text);
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts);

  const ModelEndpoint& endpoint() const { return endpoint_; }
  RateLimiter& limiter() { return limiter_; }

private:
  std::string fetch_body_with_retry(const std::string& path, const std::string& payload);

  ModelEndpoint endpoint_;
  std::shared_ptr<CacheStore> cache_;
  HttpClient http_;
  RateLimiter limiter_;
};

class EntailmentJudge {
public:
  virtual ~EntailmentJudge() = default;
  virtual int judge(const std::string& premise, const std::string& hypothesis) = 0;
  virtual const std::string& name() const = 0;
};

// kind "llm": a versioned judge prompt through the chat endpoint, with one
// reprompt before JudgeFormatError. Any other kind: a remote NLI endpoint.
std::unique_ptr<EntailmentJudge> make_judge(const ModelEndpoint& endpoint,
                                            std::shared_ptr<CacheStore> cache,
                                            std::chrono::milliseconds rate_window =
                                                kDefaultRateWindow);

}  // namespace litrev::gateway
