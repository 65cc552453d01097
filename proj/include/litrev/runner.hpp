#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "litrev/gateway.hpp"
#include "litrev/taskgen.hpp"

namespace litrev::runner {

inline constexpr const char* kVersion = "0.1.0";

struct Options {
  bool flat_title_search_rate = false;  // Eq. 6's literal pooled mean, off by default
  bool entail_premise_generated = true;
  bool anova_per_journal = false;
  int top_k = 20;
};

struct RunConfig {
  std::string corpus_path;
  std::string discipline_map_path;
  std::string cache_dir = ".litrev-cache";
  std::string out_dir = "out";
  std::vector<taskgen::TaskKind> tasks;
  uint64_t seed = 0;
  int concurrency = 4;
  bool mock = false;
  Options options;
  std::vector<gateway::ModelEndpoint> generation;
  std::optional<gateway::ModelEndpoint> embedding;
  std::vector<gateway::ModelEndpoint> judges;
  std::optional<gateway::ModelEndpoint> search;
  std::string prompt_dir;
};

// Throws Error(ConfigError); relative paths resolve against the config file.
RunConfig load_config(const std::string& path);

// Semantic validation beyond JSON shape (paths exist, tasks non-empty, the
// endpoints each requested task needs are present unless mock).
void validate_config(const RunConfig& config);

std::string config_digest(const RunConfig& config);

struct RunManifest {
  std::string config_digest;
  std::string version = kVersion;
  long long created_unix = 0;
  long long finished_unix = 0;
  nlohmann::json corpus_summary;
  nlohmann::json rollups;  // models -> tasks -> metric tree
  nlohmann::json article_status;
  int gaps = 0;
  int unparseable = 0;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
};

RunManifest run(const RunConfig& config);
RunManifest load_manifest(const std::string& path);

// The byte-stable machine-readable summary: rollups plus provenance and no
// timestamps, so identical configurations produce identical bytes.
std::string summary_bytes(const RunManifest& manifest);

// task1_accuracy, task2_context, task3_accuracy, overlap, per_dimension,
// discipline_anova as CSV plus summary.json. Percentages carry 2 decimals;
// the JSON keeps full precision.
std::vector<std::string> emit_reports(const RunManifest& manifest, const std::string& outdir);

}  // namespace litrev::runner
