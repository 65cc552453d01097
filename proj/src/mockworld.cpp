#include "litrev/mockworld.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "litrev/errors.hpp"
#include "litrev/outparse.hpp"
#include "litrev/text.hpp"

using nlohmann::json;

namespace litrev::mockworld {

namespace {

uint64_t stable_hash(const std::string& s) {
  const std::string hex = gateway::sha256_hex(s);
  uint64_t v = 0;
  for (int i = 0; i < 16; ++i) {
    v <<= 4;
    const char c = hex[i];
    v |= static_cast<uint64_t>(c <= '9' ? c - '0' : c - 'a' + 10);
  }
  return v;
}

std::string extract_line_value(const std::string& prompt, const std::string& label) {
  const std::string needle = "\n" + label + ": ";
  const size_t at = prompt.rfind(needle);
  if (at == std::string::npos) return {};
  const size_t begin = at + needle.size();
  const size_t end = prompt.find('\n', begin);
  return prompt.substr(begin, end == std::string::npos ? std::string::npos : end - begin);
}

json ref_to_entry(const corpus::RefRecord& r, bool authors_as_string, bool year_as_string) {
  json e;
  e["title"] = r.title;
  if (authors_as_string) {
    std::string joined;
    for (const auto& a : r.authors) {
      if (!joined.empty()) joined += ", ";
      joined += a;
    }
    e["authors"] = joined;
  } else {
    e["authors"] = r.authors;
  }
  e["journal"] = r.venue;
  if (r.year) {
    if (year_as_string) {
      e["year"] = "(" + std::to_string(*r.year) + ")";
    } else {
      e["year"] = *r.year;
    }
  }
  if (r.volume) e["volumes"] = *r.volume;
  if (r.first_page) e["first page"] = *r.first_page;
  if (r.last_page) e["last page"] = *r.last_page;
  return e;
}

std::vector<std::string> first_words(const std::string& s, double fraction) {
  std::istringstream in(s);
  std::vector<std::string> words;
  std::string w;
  while (in >> w) words.push_back(w);
  const size_t keep = std::max<size_t>(1, static_cast<size_t>(words.size() * fraction));
  words.resize(std::min(words.size(), keep));
  return words;
}

double type_recall(const std::string& premise, const std::string& hypothesis) {
  const auto p = text::fold_tokens(premise);
  const auto h = text::fold_tokens(hypothesis);
  if (h.empty()) return 0.0;
  const std::set<std::string> ptypes(p.begin(), p.end());
  const std::set<std::string> htypes(h.begin(), h.end());
  size_t covered = 0;
  for (const auto& t : htypes) covered += ptypes.count(t);
  return static_cast<double>(covered) / static_cast<double>(htypes.size());
}

const std::vector<std::string>& fake_words() {
  static const std::vector<std::string> w = {"imaginary", "phantom",  "apocryphal", "spurious",
                                             "invented",  "fictive",  "unrecorded", "vanished",
                                             "mythical",  "shadow"};
  return w;
}

corpus::RefRecord make_fake_ref(uint64_t h, int i) {
  corpus::RefRecord r;
  const auto& words = fake_words();
  r.title = "Imaginary treatise on " + words[(h + i) % words.size()] + " " +
            words[(h / 7 + i) % words.size()] + " " + std::to_string(9000 + (h + i * 31) % 999);
  r.authors = {"Zz " + words[(h + 3 * i) % words.size()], "Qq " + words[(h + 5 * i) % words.size()]};
  r.venue = "Journal of Imaginary Results";
  r.year = 2010 + static_cast<int>((h + i) % 14);
  r.volume = std::to_string(1 + (h + i) % 40);
  r.first_page = std::to_string(10 + (h + i) % 200);
  r.last_page = std::to_string(250 + (h + i) % 200);
  return r;
}

}  // namespace

MockWorld::MockWorld(corpus::Corpus corpus) : corpus_(std::move(corpus)) {
  std::set<std::string> seen_titles;
  corpus_.for_each_article([&](const std::string&, const corpus::ArticleRecord& a) {
    by_title_[a.title] = &a;
    for (const auto& r : a.references) {
      if (seen_titles.insert(outparse::normalize_title(r.title)).second) index_.push_back(r);
    }
  });
}

MockWorld::~MockWorld() { stop(); }

std::string MockWorld::base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

gateway::ModelEndpoint MockWorld::make_endpoint(const std::string& name,
                                                const std::string& kind) const {
  gateway::ModelEndpoint ep;
  ep.name = name;
  ep.base_url = base_url();
  ep.requests_per_minute = 100000;  // mocks are not rate-constrained
  ep.max_retries = 2;
  ep.backoff_initial_ms = 1;
  ep.kind = kind;
  return ep;
}

gateway::ModelEndpoint MockWorld::generation_endpoint(const std::string& model_name) const {
  return make_endpoint(model_name, "");
}
gateway::ModelEndpoint MockWorld::embedding_endpoint() const {
  return make_endpoint(kEmbedModel, "");
}
gateway::ModelEndpoint MockWorld::nli_judge_endpoint() const {
  return make_endpoint(kNliJudge, "nli");
}
gateway::ModelEndpoint MockWorld::llm_judge_endpoint() const {
  return make_endpoint(kLlmJudge, "llm");
}
gateway::ModelEndpoint MockWorld::search_endpoint() const {
  return make_endpoint(kSearchService, "");
}

uint64_t MockWorld::requests(const std::string& route) const {
  std::unique_lock lock(mu_);
  auto it = route_counts_.find(route);
  return it == route_counts_.end() ? 0 : it->second;
}

void MockWorld::bump(const std::string& route) {
  std::unique_lock lock(mu_);
  ++route_counts_[route];
}

std::string MockWorld::task_output(const std::string& model, int task,
                                   const std::string& prompt) const {
  const std::string title = extract_line_value(prompt, "Title");
  auto it = by_title_.find(title);
  if (it == by_title_.end()) {
    return R"({"error": "unknown article title"})";
  }
  const corpus::ArticleRecord& article = *it->second;
  const bool strong = model == kStrongModel;
  const uint64_t h = stable_hash(model + "|" + article.id + "|task" + std::to_string(task));

  // Global ordinal drives the formatting quirks deterministically.
  int ordinal = 0;
  int self = -1;
  corpus_.for_each_article([&](const std::string&, const corpus::ArticleRecord& a) {
    if (a.id == article.id) self = ordinal;
    ++ordinal;
  });

  if (task == 2) {
    const double keep = strong ? 0.7 : 0.4;
    const auto words = first_words(article.abstract, keep);
    std::string out;
    for (const auto& w : words) {
      if (!out.empty()) out += ' ';
      out += w;
    }
    out += strong ? " This review surveys the principal findings of prior studies."
                  : " More research is needed.";
    json j;
    j["Abstract"] = out;
    return j.dump();
  }

  // Tasks 1 and 3: a reference list with a model-dependent mix of copied,
  // borrowed, perturbed, and fabricated records.
  const auto& own = article.references;
  int n_own = 0;
  int n_other = 0;
  if (task == 1) {
    n_own = strong ? 4 + static_cast<int>(h % 3) : 1 + static_cast<int>(h % 2);
    n_other = strong ? 2 + static_cast<int>((h >> 2) % 2) : 1;
  } else {
    n_own = strong ? 5 + static_cast<int>(h % 3) : 2 + static_cast<int>(h % 2);
    n_other = strong ? 2 + static_cast<int>((h >> 2) % 2) : 2;
  }
  n_own = std::min<int>(n_own, static_cast<int>(own.size()));
  const int n_fake = 10 - n_own - n_other;

  std::vector<corpus::RefRecord> refs;
  for (int i = 0; i < n_own; ++i) {
    corpus::RefRecord r = own[(h + i) % own.size()];
    switch ((h + i) % 4) {
      case 1:  // near miss: wrong year, volume withheld
        if (r.year) r.year = *r.year + 1;
        r.volume.reset();
        break;
      case 2:  // title kept, every other field wrong
        r.authors = {"Nobody Inparticular"};
        r.venue = "Wrong Venue Quarterly";
        if (r.year) r.year = *r.year + 7;
        r.volume = "999";
        r.first_page = "1";
        r.last_page = "2";
        break;
      default:
        break;  // verbatim copy
    }
    refs.push_back(std::move(r));
  }
  for (int i = 0; i < n_other; ++i) {
    refs.push_back(index_[(h / 3 + i * 17) % index_.size()]);
  }
  for (int i = 0; i < n_fake; ++i) refs.push_back(make_fake_ref(h, i));

  json out;
  if (task == 3) {
    std::string review = "This review of " + title + " draws on prior work. ";
    const auto words = first_words(article.abstract, 0.3);
    for (const auto& w : words) review += w + ' ';
    out["Literature Review"] = review;
  }
  json arr = json::array();
  for (const auto& r : refs) arr.push_back(ref_to_entry(r, /*authors_as_string=*/!strong,
                                                        /*year_as_string=*/!strong));
  out["References"] = arr;
  std::string body = out.dump(2);

  // Formatting quirks, applied only to the weak model's Task 1 output and a
  // prose wrapper for the strong model, all repairable except one case.
  if (task == 1 && !strong) {
    if (self % 7 == 3) {
      return "I could not find any relevant studies for this topic. Sorry!";
    }
    if (self % 3 == 1) {
      // Trailing comma plus a code fence.
      const size_t at = body.rfind("}\n  ]");
      if (at != std::string::npos) body.insert(at + 1, ",");
      return "```json\n" + body + "\n```";
    }
  }
  if (task == 1 && strong && self % 5 == 2) {
    return "Here are the references you asked for: " + body;
  }
  return body;
}

std::string MockWorld::chat_reply(const std::string& model, const std::string& prompt) const {
  if (model == kLlmJudge) {
    const size_t p_at = prompt.find("\nPremise: ");
    const size_t h_at = prompt.find("\nHypothesis: ");
    const size_t q_at = prompt.find("\nDoes the premise entail");
    if (p_at == std::string::npos || h_at == std::string::npos || q_at == std::string::npos)
      return "maybe";
    const std::string premise = prompt.substr(p_at + 10, h_at - (p_at + 10));
    const std::string hypothesis = prompt.substr(h_at + 13, q_at - (h_at + 13));
    return type_recall(premise, hypothesis) >= 0.4 ? "1" : "0";
  }
  int task = 0;
  if (prompt.find("find the 10 studies") != std::string::npos) task = 1;
  else if (prompt.find("write an abstract") != std::string::npos) task = 2;
  else if (prompt.find("write a literature review") != std::string::npos) task = 3;
  if (task == 0) return R"({"error": "unrecognized task"})";
  return task_output(model, task, prompt);
}

void MockWorld::install_routes() {
  server_ = std::make_unique<httplib::Server>();

  server_->Post("/v1/chat/completions", [this](const httplib::Request& req,
                                               httplib::Response& res) {
    bump("chat");
    json payload = json::parse(req.body, nullptr, false);
    if (payload.is_discarded()) {
      res.status = 400;
      return;
    }
    const std::string model = payload.value("model", "");
    std::string prompt;
    if (payload.contains("messages") && payload["messages"].is_array() &&
        !payload["messages"].empty())
      prompt = payload["messages"][0].value("content", "");
    const std::string reply = chat_reply(model, prompt);
    json body;
    body["choices"] = json::array({{{"message", {{"role", "assistant"}, {"content", reply}}}}});
    body["model"] = model;
    body["usage"] = {{"prompt_tokens", static_cast<long>(prompt.size() / 4)},
                     {"completion_tokens", static_cast<long>(reply.size() / 4)}};
    res.set_content(body.dump(), "application/json");
  });

  server_->Post("/v1/embeddings", [this](const httplib::Request& req, httplib::Response& res) {
    bump("embed");
    json payload = json::parse(req.body, nullptr, false);
    if (payload.is_discarded()) {
      res.status = 400;
      return;
    }
    const std::string input = payload.value("input", "");
    const std::string hex = gateway::sha256_hex(input);
    std::vector<double> vec;
    vec.reserve(16);
    for (int i = 0; i < 16; ++i) {
      const int byte = std::stoi(hex.substr(i * 2, 2), nullptr, 16);
      vec.push_back(byte / 127.5 - 1.0);
    }
    json body;
    body["data"] = json::array({{{"embedding", vec}, {"index", 0}}});
    body["model"] = payload.value("model", "");
    res.set_content(body.dump(), "application/json");
  });

  server_->Post("/nli", [this](const httplib::Request& req, httplib::Response& res) {
    bump("nli");
    json payload = json::parse(req.body, nullptr, false);
    if (payload.is_discarded()) {
      res.status = 400;
      return;
    }
    const std::string premise = payload.value("premise", "");
    const std::string hypothesis = payload.value("hypothesis", "");
    json body;
    body["entails"] = type_recall(premise, hypothesis) >= 0.5;
    res.set_content(body.dump(), "application/json");
  });

  server_->Get("/search", [this](const httplib::Request& req, httplib::Response& res) {
    bump("search");
    const std::string kind = req.get_param_value("kind");
    const std::string query = req.get_param_value("query");
    int limit = 20;
    if (req.has_param("limit")) limit = std::stoi(req.get_param_value("limit"));

    struct Scored {
      double score;
      const corpus::RefRecord* rec;
    };
    std::vector<Scored> scored;
    if (kind == "author") {
      const auto want = outparse::normalize_author(query);
      for (const auto& r : index_) {
        if (r.authors.empty()) continue;
        if (outparse::authors_equivalent(outparse::normalize_author(r.authors.front()), want))
          scored.push_back({1.0, &r});
      }
    } else {
      const auto qtokens = text::fold_tokens(query);
      const std::set<std::string> qset(qtokens.begin(), qtokens.end());
      for (const auto& r : index_) {
        const auto ttokens = text::fold_tokens(r.title);
        const std::set<std::string> tset(ttokens.begin(), ttokens.end());
        size_t inter = 0;
        for (const auto& t : tset) inter += qset.count(t);
        const size_t uni = qset.size() + tset.size() - inter;
        const double jaccard = uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
        if (jaccard >= 0.6) scored.push_back({jaccard, &r});
      }
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.rec->title < b.rec->title;
    });
    if (static_cast<int>(scored.size()) > limit) scored.resize(limit);

    json results = json::array();
    for (const auto& s : scored) {
      json e;
      e["title"] = s.rec->title;
      e["authors"] = s.rec->authors;
      e["venue"] = s.rec->venue;
      if (s.rec->year) e["year"] = *s.rec->year;
      if (s.rec->volume) e["volume"] = *s.rec->volume;
      if (s.rec->first_page) e["first_page"] = *s.rec->first_page;
      if (s.rec->last_page) e["last_page"] = *s.rec->last_page;
      results.push_back(std::move(e));
    }
    json body;
    body["results"] = std::move(results);
    res.set_content(body.dump(), "application/json");
  });
}

void MockWorld::start() {
  install_routes();
  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw Error(Errc::TransportError, "mock server could not bind a port");
  thread_ = std::thread([this]() { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void MockWorld::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace litrev::mockworld
