#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "litrev/corpus.hpp"
#include "litrev/gateway.hpp"

namespace httplib {
class Server;
}

namespace litrev::mockworld {

// Deterministic stand-ins for every remote dependency, served over local
// HTTP: two generation models of different quality, an embedding endpoint,
// an NLI judge, an LLM judge, and a scholarly search service indexing the
// corpus's references. Responses are pure functions of request content, so
// repeated runs and any worker count produce identical results.
class MockWorld {
public:
  explicit MockWorld(corpus::Corpus corpus);
  ~MockWorld();

  MockWorld(const MockWorld&) = delete;
  MockWorld& operator=(const MockWorld&) = delete;

  void start();
  void stop();

  int port() const { return port_; }
  std::string base_url() const;

  static constexpr const char* kStrongModel = "mock-scholar";
  static constexpr const char* kWeakModel = "mock-novice";
  static constexpr const char* kEmbedModel = "mock-embed";
  static constexpr const char* kNliJudge = "mock-true";
  static constexpr const char* kLlmJudge = "mock-llmjudge";
  static constexpr const char* kSearchService = "mock-scholar-search";

  gateway::ModelEndpoint generation_endpoint(const std::string& model_name) const;
  gateway::ModelEndpoint embedding_endpoint() const;
  gateway::ModelEndpoint nli_judge_endpoint() const;
  gateway::ModelEndpoint llm_judge_endpoint() const;
  gateway::ModelEndpoint search_endpoint() const;

  uint64_t requests(const std::string& route) const;

private:
  gateway::ModelEndpoint make_endpoint(const std::string& name, const std::string& kind) const;
  void install_routes();
  void bump(const std::string& route);

  std::string chat_reply(const std::string& model, const std::string& prompt) const;
  std::string task_output(const std::string& model, int task, const std::string& prompt) const;

  corpus::Corpus corpus_;
  std::map<std::string, const corpus::ArticleRecord*> by_title_;
  std::vector<corpus::RefRecord> index_;

  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;

  mutable std::mutex mu_;
  std::map<std::string, uint64_t> route_counts_;
};

}  // namespace litrev::mockworld
