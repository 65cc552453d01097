#include "litrev/runner.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "litrev/analytics.hpp"
#include "litrev/corpus.hpp"
#include "litrev/errors.hpp"
#include "litrev/mockworld.hpp"
#include "litrev/outparse.hpp"
#include "litrev/refverify.hpp"
#include "litrev/text.hpp"
#include "litrev/textmetrics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace litrev::runner {

namespace {

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  if (path.empty()) return path;
  fs::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (fs::path(base_dir) / p).string();
}

gateway::ModelEndpoint endpoint_from_json(const json& j) {
  gateway::ModelEndpoint ep;
  ep.name = j.value("name", "");
  ep.base_url = j.value("base_url", "");
  ep.auth_env_var = j.value("auth_env_var", "");
  ep.requests_per_minute = j.value("requests_per_minute", 60);
  ep.max_retries = j.value("max_retries", 3);
  ep.kind = j.value("kind", "");
  ep.backoff_initial_ms = j.value("backoff_initial_ms", 250);
  ep.read_timeout_s = j.value("read_timeout_s", 120);
  return ep;
}

json endpoint_to_json(const gateway::ModelEndpoint& ep) {
  json j;
  j["name"] = ep.name;
  j["base_url"] = ep.base_url;
  j["auth_env_var"] = ep.auth_env_var;
  j["requests_per_minute"] = ep.requests_per_minute;
  j["max_retries"] = ep.max_retries;
  j["kind"] = ep.kind;
  return j;
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "missing";
  std::ostringstream buf;
  buf << in.rdbuf();
  return gateway::sha256_hex(buf.str());
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot open config: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::ConfigError, "config is not valid JSON: " + path);

  const std::string base_dir = fs::path(path).parent_path().string();
  RunConfig cfg;
  cfg.corpus_path = resolve_path(base_dir, j.value("corpus", ""));
  cfg.discipline_map_path = resolve_path(base_dir, j.value("discipline_map", ""));
  cfg.cache_dir = resolve_path(base_dir, j.value("cache_dir", std::string(".litrev-cache")));
  cfg.out_dir = resolve_path(base_dir, j.value("out_dir", std::string("out")));
  cfg.prompt_dir = resolve_path(base_dir, j.value("prompt_dir", ""));
  cfg.seed = j.value("seed", 0ULL);
  cfg.concurrency = j.value("concurrency", 4);
  cfg.mock = j.value("mock", false);

  if (j.contains("tasks")) {
    for (const auto& t : j["tasks"]) cfg.tasks.push_back(taskgen::task_from_number(t.get<int>()));
    std::sort(cfg.tasks.begin(), cfg.tasks.end());
    cfg.tasks.erase(std::unique(cfg.tasks.begin(), cfg.tasks.end()), cfg.tasks.end());
  }

  if (j.contains("options")) {
    const json& o = j["options"];
    cfg.options.flat_title_search_rate = o.value("flat_title_search_rate", false);
    cfg.options.entail_premise_generated = o.value("entail_premise", "generated") == "generated";
    cfg.options.anova_per_journal = o.value("anova_per_journal", false);
    cfg.options.top_k = o.value("top_k", 20);
  }

  if (j.contains("endpoints")) {
    const json& e = j["endpoints"];
    if (e.contains("generation"))
      for (const auto& g : e["generation"]) cfg.generation.push_back(endpoint_from_json(g));
    if (e.contains("embedding")) cfg.embedding = endpoint_from_json(e["embedding"]);
    if (e.contains("judges"))
      for (const auto& g : e["judges"]) cfg.judges.push_back(endpoint_from_json(g));
    if (e.contains("search")) cfg.search = endpoint_from_json(e["search"]);
  }
  return cfg;
}

void validate_config(const RunConfig& config) {
  if (config.tasks.empty()) throw Error(Errc::ConfigError, "no tasks configured");
  if (config.concurrency < 1) throw Error(Errc::ConfigError, "concurrency must be >= 1");
  if (config.options.top_k < 1) throw Error(Errc::ConfigError, "top_k must be >= 1");
  if (config.corpus_path.empty() || !fs::exists(config.corpus_path))
    throw Error(Errc::ConfigError, "corpus file not found: " + config.corpus_path);
  if (!config.discipline_map_path.empty() && !fs::exists(config.discipline_map_path))
    throw Error(Errc::ConfigError, "discipline map not found: " + config.discipline_map_path);
  if (!config.prompt_dir.empty() && !fs::exists(config.prompt_dir))
    throw Error(Errc::ConfigError, "prompt dir not found: " + config.prompt_dir);
  if (config.mock) return;  // bundled mock servers replace every endpoint

  if (config.generation.empty())
    throw Error(Errc::ConfigError, "at least one generation endpoint is required");
  const bool has_ref_task =
      std::find(config.tasks.begin(), config.tasks.end(), taskgen::TaskKind::Task1_References) !=
          config.tasks.end() ||
      std::find(config.tasks.begin(), config.tasks.end(), taskgen::TaskKind::Task3_Review) !=
          config.tasks.end();
  const bool has_task2 =
      std::find(config.tasks.begin(), config.tasks.end(), taskgen::TaskKind::Task2_Abstract) !=
      config.tasks.end();
  if (has_ref_task && !config.search)
    throw Error(Errc::ConfigError, "tasks 1/3 require a scholarly search endpoint");
  if (has_task2 && !config.embedding)
    throw Error(Errc::ConfigError, "task 2 requires an embedding endpoint");
  if (has_task2 && config.judges.empty())
    throw Error(Errc::ConfigError, "task 2 requires at least one entailment judge");
}

std::string config_digest(const RunConfig& config) {
  json j;
  j["corpus_sha256"] = file_digest(config.corpus_path);
  j["discipline_map_sha256"] =
      config.discipline_map_path.empty() ? "none" : file_digest(config.discipline_map_path);
  json tasks = json::array();
  for (const auto t : config.tasks) tasks.push_back(taskgen::task_number(t));
  j["tasks"] = tasks;
  j["seed"] = config.seed;
  j["mock"] = config.mock;
  j["options"] = {{"flat_title_search_rate", config.options.flat_title_search_rate},
                  {"entail_premise_generated", config.options.entail_premise_generated},
                  {"anova_per_journal", config.options.anova_per_journal},
                  {"top_k", config.options.top_k}};
  json gens = json::array();
  for (const auto& g : config.generation) gens.push_back(endpoint_to_json(g));
  j["generation"] = gens;
  j["embedding"] = config.embedding ? endpoint_to_json(*config.embedding) : json();
  json judges = json::array();
  for (const auto& g : config.judges) judges.push_back(endpoint_to_json(g));
  j["judges"] = judges;
  j["search"] = config.search ? endpoint_to_json(*config.search) : json();
  j["prompt_dir"] = config.prompt_dir;
  return gateway::sha256_hex(j.dump());
}

json RunManifest::to_json() const {
  json j;
  j["config_digest"] = config_digest;
  j["version"] = version;
  j["created_unix"] = created_unix;
  j["finished_unix"] = finished_unix;
  j["corpus"] = corpus_summary;
  j["rollups"] = rollups;
  j["article_status"] = article_status;
  j["gaps"] = gaps;
  j["unparseable"] = unparseable;
  return j;
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.config_digest = j.value("config_digest", "");
  m.version = j.value("version", "");
  m.created_unix = j.value("created_unix", 0LL);
  m.finished_unix = j.value("finished_unix", 0LL);
  m.corpus_summary = j.value("corpus", json::object());
  m.rollups = j.value("rollups", json::object());
  m.article_status = j.value("article_status", json::object());
  m.gaps = j.value("gaps", 0);
  m.unparseable = j.value("unparseable", 0);
  return m;
}

RunManifest load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot open manifest: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::ConfigError, "manifest is not valid JSON: " + path);
  return RunManifest::from_json(j);
}

namespace {

struct Unit {
  size_t model_idx = 0;
  taskgen::TaskKind task = taskgen::TaskKind::Task1_References;
  const corpus::ArticleRecord* article = nullptr;
};

struct UnitOutcome {
  std::string status = "ok";  // ok | gap | unparseable
  std::string detail;
  std::string raw;  // kept only for the unparseable audit

  // tasks 1 and 3
  int emitted = 0;
  int malformed = 0;
  bool had_et_al = false;
  int unverifiable = 0;
  std::vector<refverify::VerificationResult> all_mode;
  std::vector<refverify::VerificationResult> first_mode;
  std::vector<std::string> unverifiable_notes;
  std::optional<analytics::OverlapResult> overlap;

  // task 2
  std::optional<double> similarity;
  std::optional<textmetrics::RougeScore> rouge1;
  std::optional<textmetrics::RougeScore> rouge2;
  std::optional<textmetrics::RougeScore> rouge_l;
  std::map<std::string, int> entail;
  std::vector<std::string> judge_failures;
  int gen_words = 0;
};

struct Services {
  std::vector<std::unique_ptr<gateway::LlmClient>> generation;
  std::unique_ptr<gateway::LlmClient> embedding;
  std::vector<std::unique_ptr<gateway::EntailmentJudge>> judges;
  std::unique_ptr<refverify::ScholarClient> scholar;
};

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (const double v : values) sum += v;
  return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

// Journal-weighted mean of means over a per-journal table of per-article
// values, written once and reused by every metric fold.
double hierarchical_mean(const std::map<std::string, std::vector<double>>& per_journal) {
  double sum = 0.0;
  size_t journals = 0;
  for (const auto& [jid, values] : per_journal) {
    if (values.empty()) continue;
    sum += mean_of(values);
    ++journals;
  }
  return journals == 0 ? 0.0 : sum / static_cast<double>(journals);
}

UnitOutcome process_reference_task(const Unit& unit, const std::string& raw,
                                   const RunConfig& config, Services& services) {
  UnitOutcome out;
  const auto parsed = outparse::parse_task_output(raw, unit.task);
  if (!parsed.parsed) {
    out.status = "unparseable";
    out.detail = parsed.note;
    out.raw = raw;
    return out;
  }
  out.detail = parsed.note;
  const outparse::ParsedReferences& prefs = *parsed.references;
  out.emitted = static_cast<int>(prefs.refs.size());
  out.malformed = prefs.malformed_entries;
  out.had_et_al = prefs.had_et_al;

  std::vector<outparse::GeneratedRef> refs = prefs.refs;
  if (static_cast<int>(refs.size()) > taskgen::kRequestedReferences)
    refs.resize(taskgen::kRequestedReferences);

  for (size_t i = 0; i < refs.size(); ++i) {
    try {
      const refverify::CandidateSets sets = services.scholar->search_candidates(refs[i]);
      refverify::VerificationResult ra;
      ra.generated = refs[i];
      ra.author_mode = refverify::AuthorMode::AllAuthors;
      ra.title_search_hit = !sets.by_title.empty();
      auto [best_a, flags_a] =
          refverify::select_best_candidate(refs[i], sets, refverify::AuthorMode::AllAuthors);
      ra.best_candidate = best_a;
      ra.flags = flags_a;
      ra.is_true = best_a.has_value() && refverify::decide_true(flags_a);

      refverify::VerificationResult rf;
      rf.generated = refs[i];
      rf.author_mode = refverify::AuthorMode::FirstAuthorOnly;
      rf.title_search_hit = ra.title_search_hit;
      auto [best_f, flags_f] =
          refverify::select_best_candidate(refs[i], sets, refverify::AuthorMode::FirstAuthorOnly);
      rf.best_candidate = best_f;
      rf.flags = flags_f;
      rf.is_true = best_f.has_value() && refverify::decide_true(flags_f);

      out.all_mode.push_back(std::move(ra));
      out.first_mode.push_back(std::move(rf));
    } catch (const Error& e) {
      if (e.code() != Errc::SearchUnavailable) throw;
      ++out.unverifiable;
      out.unverifiable_notes.push_back("ref " + std::to_string(i) + " (" + refs[i].title +
                                       "): " + e.what());
    }
  }

  out.overlap = analytics::overlap_with_human(refs, unit.article->references,
                                              refverify::AuthorMode::AllAuthors);
  return out;
}

UnitOutcome process_abstract_task(const Unit& unit, const std::string& raw,
                                  const RunConfig& config, Services& services) {
  UnitOutcome out;
  const auto parsed = outparse::parse_task_output(raw, unit.task);
  if (!parsed.parsed || text::trim(*parsed.text).empty()) {
    out.status = "unparseable";
    out.detail = parsed.parsed ? "empty abstract" : parsed.note;
    out.raw = raw;
    return out;
  }
  out.detail = parsed.note;
  const std::string& generated = *parsed.text;
  const std::string& human = unit.article->abstract;
  out.gen_words = taskgen::count_words(generated);

  const auto vectors = services.embedding->embed({human, generated});
  out.similarity = textmetrics::cosine_similarity(vectors[0], vectors[1]);
  out.rouge1 = textmetrics::rouge_n(generated, human, 1);
  out.rouge2 = textmetrics::rouge_n(generated, human, 2);
  out.rouge_l = textmetrics::rouge_l(generated, human);

  for (const auto& judge : services.judges) {
    const std::string& premise = config.options.entail_premise_generated ? generated : human;
    const std::string& hypothesis = config.options.entail_premise_generated ? human : generated;
    try {
      out.entail[judge->name()] = judge->judge(premise, hypothesis);
    } catch (const Error& e) {
      out.judge_failures.push_back(judge->name() + ": " + e.what());
    }
  }
  return out;
}

UnitOutcome process_unit(const Unit& unit, const RunConfig& config, Services& services,
                         const taskgen::TemplateSet& templates) {
  UnitOutcome out;
  try {
    const taskgen::PromptInstance prompt =
        taskgen::build_prompt(*unit.article, unit.task, templates);
    const std::string raw = services.generation[unit.model_idx]->complete(prompt);
    if (unit.task == taskgen::TaskKind::Task2_Abstract)
      return process_abstract_task(unit, raw, config, services);
    return process_reference_task(unit, raw, config, services);
  } catch (const Error& e) {
    if (e.code() == Errc::FatalStorageError) throw;
    out.status = "gap";
    out.detail = e.what();
  } catch (const std::exception& e) {
    out.status = "gap";
    out.detail = e.what();
  }
  return out;
}

void write_text_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream outf(path, std::ios::binary | std::ios::trunc);
  if (!outf) throw Error(Errc::FatalStorageError, "cannot write " + path.string());
  outf << content;
}

json dims_to_json(const std::array<double, 7>& dims) {
  json j;
  for (size_t d = 0; d < 7; ++d) j[refverify::kElementNames[d]] = dims[d];
  return j;
}

}  // namespace

RunManifest run(const RunConfig& config) {
  validate_config(config);

  corpus::Corpus corp = corpus::load_corpus(config.corpus_path);
  if (!config.discipline_map_path.empty())
    corp = corpus::assign_disciplines(corp, corpus::load_discipline_map(config.discipline_map_path));

  std::unique_ptr<mockworld::MockWorld> world;
  std::vector<gateway::ModelEndpoint> gen_endpoints = config.generation;
  std::optional<gateway::ModelEndpoint> embed_endpoint = config.embedding;
  std::vector<gateway::ModelEndpoint> judge_endpoints = config.judges;
  std::optional<gateway::ModelEndpoint> search_endpoint = config.search;

  if (config.mock) {
    world = std::make_unique<mockworld::MockWorld>(corp);
    world->start();
    gen_endpoints.clear();
    gen_endpoints.push_back(world->generation_endpoint(mockworld::MockWorld::kStrongModel));
    gen_endpoints.push_back(world->generation_endpoint(mockworld::MockWorld::kWeakModel));
    embed_endpoint = world->embedding_endpoint();
    judge_endpoints = {world->nli_judge_endpoint(), world->llm_judge_endpoint()};
    search_endpoint = world->search_endpoint();
  }

  const taskgen::TemplateSet templates = config.prompt_dir.empty()
                                             ? taskgen::default_templates()
                                             : taskgen::load_templates_dir(config.prompt_dir);

  auto cache = std::make_shared<gateway::CacheStore>(config.cache_dir);
  Services services;
  for (const auto& ep : gen_endpoints)
    services.generation.push_back(std::make_unique<gateway::LlmClient>(ep, cache));
  if (embed_endpoint)
    services.embedding = std::make_unique<gateway::LlmClient>(*embed_endpoint, cache);
  for (const auto& ep : judge_endpoints)
    services.judges.push_back(gateway::make_judge(ep, cache));
  if (search_endpoint)
    services.scholar = std::make_unique<refverify::ScholarClient>(*search_endpoint, cache,
                                                                  config.options.top_k);

  RunManifest manifest;
  manifest.config_digest = config_digest(config);
  manifest.created_unix = std::chrono::duration_cast<std::chrono::seconds>(
                              std::chrono::system_clock::now().time_since_epoch())
                              .count();

  // Deterministic unit order: model, then task, then sorted corpus order.
  std::vector<Unit> units;
  for (size_t m = 0; m < gen_endpoints.size(); ++m) {
    for (const auto task : config.tasks) {
      corp.for_each_article([&](const std::string&, const corpus::ArticleRecord& a) {
        units.push_back(Unit{m, task, &a});
      });
    }
  }

  std::vector<UnitOutcome> outcomes(units.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= units.size()) break;
      outcomes[i] = process_unit(units[i], config, services, templates);
    }
  };
  const int workers = std::max(1, config.concurrency);
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (world) world->stop();

  // ---- deterministic single-threaded fold ----
  const auto stats = corpus::corpus_stats(corp);
  json corpus_summary;
  corpus_summary["articles"] = stats.total;
  corpus_summary["journals"] = corp.journal_count();
  corpus_summary["per_journal"] = stats.per_journal;
  if (!stats.per_discipline.empty()) corpus_summary["per_discipline"] = stats.per_discipline;
  manifest.corpus_summary = corpus_summary;

  json rollups = json::object();
  json статус_unused;
  json article_status = json::object();
  std::string audit_unparseable;
  std::string audit_unverifiable;
  std::string details_articles;
  std::string details_refs;

  const bool have_disciplines = !stats.per_discipline.empty();

  for (size_t m = 0; m < gen_endpoints.size(); ++m) {
    const std::string& model = gen_endpoints[m].name;
    json model_json = json::object();
    json disciplines_json = json::object();

    for (const auto task : config.tasks) {
      const int task_no = taskgen::task_number(task);
      const std::string task_key = taskgen::task_name(task);

      // Collect this (model, task)'s outcomes keyed by journal and article.
      std::map<std::string, std::vector<double>> acc_all_pj, acc_first_pj, hits_pj;
      std::map<std::string, std::vector<double>> sim_pj;
      std::map<std::string, std::vector<double>> r1_pj, r2_pj, rl_pj;
      std::array<std::map<std::string, std::vector<double>>, 7> dims_pj;
      std::map<std::string, std::vector<double>> ov_title_pj, ov_pj, ov_first_pj;
      std::array<std::map<std::string, std::vector<double>>, 7> ov_dims_pj;
      std::map<std::string, std::map<std::string, std::vector<double>>> entail_pj;  // judge →
      std::map<std::string, std::vector<std::pair<int, int>>> flat_hits_pj;
      std::map<std::string, double> per_article_metric;  // for discipline grouping
      int gaps = 0, unparseable = 0, scored = 0, unverifiable_refs = 0;

      for (size_t i = 0; i < units.size(); ++i) {
        if (units[i].model_idx != m || units[i].task != task) continue;
        const Unit& unit = units[i];
        const UnitOutcome& out = outcomes[i];
        const std::string& jid = unit.article->journal_id;
        const std::string status_key =
            model + "/" + task_key + "/" + unit.article->id;
        json st;
        st["status"] = out.status;
        if (!out.detail.empty()) st["detail"] = out.detail;
        article_status[status_key] = st;

        if (out.status == "gap") {
          ++gaps;
          continue;
        }
        const bool is_unparseable = out.status == "unparseable";
        if (is_unparseable) {
          ++unparseable;
          json a;
          a["model"] = model;
          a["task"] = task_no;
          a["article_id"] = unit.article->id;
          a["note"] = out.detail;
          a["raw"] = out.raw;
          audit_unparseable += a.dump();
          audit_unparseable += '\n';
        }

        if (task == taskgen::TaskKind::Task2_Abstract) {
          const double sim = is_unparseable ? 0.0 : out.similarity.value_or(0.0);
          const double r1 = is_unparseable || !out.rouge1 ? 0.0 : out.rouge1->f1;
          const double r2 = is_unparseable || !out.rouge2 ? 0.0 : out.rouge2->f1;
          const double rl = is_unparseable || !out.rouge_l ? 0.0 : out.rouge_l->f1;
          sim_pj[jid].push_back(sim);
          r1_pj[jid].push_back(r1);
          r2_pj[jid].push_back(r2);
          rl_pj[jid].push_back(rl);
          for (const auto& judge : services.judges) {
            int bit = 0;
            if (!is_unparseable) {
              auto it = out.entail.find(judge->name());
              if (it == out.entail.end()) continue;  // judge failure: a recorded gap
              bit = it->second;
            }
            entail_pj[judge->name()][jid].push_back(bit);
          }
          ++scored;
          if (!services.judges.empty()) {
            const std::string& anova_judge = services.judges.front()->name();
            auto it = out.entail.find(anova_judge);
            per_article_metric[unit.article->id] =
                is_unparseable ? 0.0 : (it != out.entail.end() ? it->second : 0.0);
          }
          json d;
          d["model"] = model;
          d["task"] = task_no;
          d["article_id"] = unit.article->id;
          d["journal_id"] = jid;
          d["status"] = out.status;
          d["similarity"] = sim;
          d["rouge1_f1"] = r1;
          d["rouge2_f1"] = r2;
          d["rouge_l_f1"] = rl;
          d["entail"] = out.entail;
          d["gen_words"] = out.gen_words;
          details_articles += d.dump();
          details_articles += '\n';
          continue;
        }

        // Tasks 1 and 3.
        const int requested = taskgen::kRequestedReferences;
        const int denom = requested - out.unverifiable;
        if (!is_unparseable && denom <= 0) {
          ++gaps;  // nothing verifiable: a recorded per-article gap
          continue;
        }
        unverifiable_refs += out.unverifiable;
        for (const auto& note : out.unverifiable_notes) {
          json a;
          a["model"] = model;
          a["task"] = task_no;
          a["article_id"] = unit.article->id;
          a["note"] = note;
          audit_unverifiable += a.dump();
          audit_unverifiable += '\n';
        }

        double acc_all = 0.0, acc_first = 0.0, hit_frac = 0.0;
        std::array<double, 7> dims{};
        analytics::OverlapResult ov;
        if (!is_unparseable) {
          int truths_all = 0, truths_first = 0, hits = 0;
          for (const auto& r : out.all_mode) {
            if (r.is_true) ++truths_all;
            if (r.title_search_hit) ++hits;
          }
          for (const auto& r : out.first_mode)
            if (r.is_true) ++truths_first;
          acc_all = static_cast<double>(truths_all) / denom;
          acc_first = static_cast<double>(truths_first) / denom;
          hit_frac = static_cast<double>(hits) / denom;
          dims = refverify::per_dimension_accuracy(out.all_mode);
          ov = out.overlap.value_or(analytics::OverlapResult{});
          flat_hits_pj[jid].push_back({hits, denom});
        } else {
          flat_hits_pj[jid].push_back({0, requested});
        }

        acc_all_pj[jid].push_back(acc_all);
        acc_first_pj[jid].push_back(acc_first);
        hits_pj[jid].push_back(hit_frac);
        for (size_t d = 0; d < 7; ++d) dims_pj[d][jid].push_back(dims[d]);
        ov_title_pj[jid].push_back(ov.title_acc);
        ov_pj[jid].push_back(ov.overlap);
        ov_first_pj[jid].push_back(ov.overlap_first_author);
        for (size_t d = 0; d < 7; ++d) ov_dims_pj[d][jid].push_back(ov.per_dimension[d]);
        per_article_metric[unit.article->id] = acc_all;
        ++scored;

        json d;
        d["model"] = model;
        d["task"] = task_no;
        d["article_id"] = unit.article->id;
        d["journal_id"] = jid;
        d["status"] = out.status;
        d["acc"] = acc_all;
        d["acc_first_author"] = acc_first;
        d["hit_fraction"] = hit_frac;
        d["denominator"] = is_unparseable ? requested : denom;
        d["emitted"] = out.emitted;
        d["malformed_entries"] = out.malformed;
        d["had_et_al"] = out.had_et_al;
        d["unverifiable"] = out.unverifiable;
        d["overlap"] = {{"title_acc", ov.title_acc},
                        {"overlap", ov.overlap},
                        {"overlap_first_author", ov.overlap_first_author},
                        {"per_dimension", dims_to_json(ov.per_dimension)}};
        d["per_dimension"] = dims_to_json(dims);
        details_articles += d.dump();
        details_articles += '\n';

        for (size_t ri = 0; ri < out.all_mode.size(); ++ri) {
          const auto& ra = out.all_mode[ri];
          const auto& rf = out.first_mode[ri];
          json rj;
          rj["model"] = model;
          rj["task"] = task_no;
          rj["article_id"] = unit.article->id;
          rj["journal_id"] = jid;
          rj["ref_index"] = ri;
          rj["title"] = ra.generated.title;
          json fl = json::array();
          json flf = json::array();
          for (size_t dd = 0; dd < 7; ++dd) {
            fl.push_back(ra.flags.e[dd] ? 1 : 0);
            flf.push_back(rf.flags.e[dd] ? 1 : 0);
          }
          rj["flags"] = fl;
          rj["flags_first"] = flf;
          rj["is_true"] = ra.is_true;
          rj["is_true_first"] = rf.is_true;
          rj["hit"] = ra.title_search_hit;
          rj["has_candidate"] = ra.best_candidate.has_value();
          details_refs += rj.dump();
          details_refs += '\n';
        }
      }

      json task_json;
      task_json["articles_scored"] = scored;
      task_json["gaps"] = gaps;
      task_json["unparseable"] = unparseable;

      if (task == taskgen::TaskKind::Task2_Abstract) {
        task_json["similarity"] = hierarchical_mean(sim_pj);
        task_json["rouge1_f1"] = hierarchical_mean(r1_pj);
        task_json["rouge2_f1"] = hierarchical_mean(r2_pj);
        task_json["rouge_l_f1"] = hierarchical_mean(rl_pj);
        json entail_json = json::object();
        for (const auto& [judge_name, pj] : entail_pj)
          entail_json[judge_name] = hierarchical_mean(pj);
        task_json["entail"] = entail_json;
        json per_journal = json::object();
        for (const auto& [jid, values] : sim_pj) {
          json row;
          row["similarity"] = mean_of(values);
          json ent = json::object();
          for (const auto& [judge_name, pj] : entail_pj) {
            auto it = pj.find(jid);
            if (it != pj.end()) ent[judge_name] = mean_of(it->second);
          }
          row["entail"] = ent;
          row["rouge1_f1"] = mean_of(r1_pj[jid]);
          row["rouge2_f1"] = mean_of(r2_pj[jid]);
          row["rouge_l_f1"] = mean_of(rl_pj[jid]);
          per_journal[jid] = row;
        }
        task_json["per_journal"] = per_journal;
      } else {
        task_json["acc"] = hierarchical_mean(acc_all_pj);
        task_json["acc_first_author"] = hierarchical_mean(acc_first_pj);
        task_json["s_t"] = config.options.flat_title_search_rate
                               ? refverify::flat_title_search_rate(flat_hits_pj)
                               : hierarchical_mean(hits_pj);
        task_json["s_t_flat"] = refverify::flat_title_search_rate(flat_hits_pj);
        task_json["unverifiable_refs"] = unverifiable_refs;
        json dims_json;
        for (size_t d = 0; d < 7; ++d)
          dims_json[refverify::kElementNames[d]] = hierarchical_mean(dims_pj[d]);
        task_json["per_dimension"] = dims_json;
        json ov_dims_json;
        for (size_t d = 0; d < 7; ++d)
          ov_dims_json[refverify::kElementNames[d]] = hierarchical_mean(ov_dims_pj[d]);
        task_json["overlap"] = {{"title_acc", hierarchical_mean(ov_title_pj)},
                                {"overlap", hierarchical_mean(ov_pj)},
                                {"overlap_first_author", hierarchical_mean(ov_first_pj)},
                                {"per_dimension", ov_dims_json}};
        json per_journal = json::object();
        for (const auto& [jid, values] : acc_all_pj) {
          json row;
          row["acc"] = mean_of(values);
          row["acc_first_author"] = mean_of(acc_first_pj[jid]);
          row["s_t"] = mean_of(hits_pj[jid]);
          per_journal[jid] = row;
        }
        task_json["per_journal"] = per_journal;
      }
      model_json[task_key] = task_json;

      if (have_disciplines && !per_article_metric.empty()) {
        json disc;
        disc["metric"] = task == taskgen::TaskKind::Task2_Abstract
                             ? (services.judges.empty()
                                    ? std::string("entail")
                                    : "entail:" + services.judges.front()->name())
                             : std::string("accuracy");
        auto groups_map = analytics::group_by_discipline(per_article_metric, corp);
        json groups_json = json::object();
        std::vector<std::vector<double>> groups;
        bool anova_ok = groups_map.size() >= 2;
        for (const auto& [name, values] : groups_map) {
          json g;
          g["mean"] = mean_of(values);
          g["n"] = values.size();
          groups_json[name] = g;
          if (values.size() < 2) anova_ok = false;
          groups.push_back(values);
        }
        disc["groups"] = groups_json;
        if (anova_ok) {
          const analytics::AnovaResult res = analytics::one_way_anova(groups);
          json aj;
          if (res.degenerate) {
            aj["degenerate"] = true;
            aj["f"] = "inf";
            aj["p"] = 0.0;
          } else {
            aj["f"] = res.f_stat;
            aj["p"] = res.p_value;
          }
          aj["df_between"] = res.df_between;
          aj["df_within"] = res.df_within;
          disc["anova"] = aj;
        } else {
          disc["anova"] = {{"note", "insufficient data (need >= 2 groups with >= 2 values)"}};
        }
        disciplines_json[task_key] = disc;
      }
    }

    if (!disciplines_json.empty()) model_json["disciplines"] = disciplines_json;
    rollups[model] = model_json;
    manifest.gaps += 0;  // accumulated below from article_status
  }

  // Totals over every (model, task, article) triple.
  int total_gaps = 0;
  int total_unparseable = 0;
  for (const auto& [key, st] : article_status.items()) {
    const std::string s = st.value("status", "");
    if (s == "gap") ++total_gaps;
    if (s == "unparseable") ++total_unparseable;
  }
  manifest.gaps = total_gaps;
  manifest.unparseable = total_unparseable;
  manifest.rollups = rollups;
  manifest.article_status = article_status;
  manifest.finished_unix = std::chrono::duration_cast<std::chrono::seconds>(
                               std::chrono::system_clock::now().time_since_epoch())
                               .count();

  const fs::path outdir(config.out_dir);
  write_text_file(outdir / "manifest.json", manifest.to_json().dump(2) + "\n");
  write_text_file(outdir / "details" / "per_article.jsonl", details_articles);
  write_text_file(outdir / "details" / "per_ref.jsonl", details_refs);
  write_text_file(outdir / "audit" / "unparseable.jsonl", audit_unparseable);
  write_text_file(outdir / "audit" / "unverifiable.jsonl", audit_unverifiable);
  emit_reports(manifest, config.out_dir);
  return manifest;
}

}  // namespace litrev::runner
