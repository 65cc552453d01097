#include <thread>

#include "json.hpp"
#include "litrev/errors.hpp"
#include "litrev/refverify.hpp"
#include "litrev/text.hpp"

using nlohmann::json;

namespace litrev::refverify {

namespace {

std::string url_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size() * 3 / 2);
  for (const char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(c);
    } else {
      out.push_back('%');
      out.push_back(hex[u >> 4]);
      out.push_back(hex[u & 0xF]);
    }
  }
  return out;
}

std::optional<std::string> rec_string(const json& e, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    auto it = e.find(key);
    if (it == e.end() || it->is_null()) continue;
    if (it->is_string()) {
      std::string v = text::trim(it->get<std::string>());
      if (!v.empty()) return v;
    } else if (it->is_number_integer()) {
      return std::to_string(it->get<long long>());
    }
  }
  return std::nullopt;
}

std::vector<CandidateRecord> parse_results(const std::string& body, CandidateSource source,
                                           int top_k) {
  std::vector<CandidateRecord> out;
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.contains("results") || !j["results"].is_array()) return out;
  for (const auto& e : j["results"]) {
    if (static_cast<int>(out.size()) >= top_k) break;
    if (!e.is_object()) continue;
    CandidateRecord cand;
    cand.source = source;
    auto title = rec_string(e, {"title"});
    if (!title) continue;
    cand.rec.title = *title;
    if (auto it = e.find("authors"); it != e.end() && it->is_array()) {
      for (const auto& a : *it)
        if (a.is_string() && !text::trim(a.get<std::string>()).empty())
          cand.rec.authors.push_back(a.get<std::string>());
    }
    if (auto v = rec_string(e, {"venue", "journal"})) cand.rec.venue = *v;
    if (auto it = e.find("year"); it != e.end()) {
      if (it->is_number_integer()) {
        cand.rec.year = it->get<int>();
      } else if (it->is_string()) {
        cand.rec.year = outparse::parse_year_field(it->get<std::string>());
      }
    }
    cand.rec.volume = rec_string(e, {"volume", "volumes"});
    cand.rec.first_page = rec_string(e, {"first_page", "first page"});
    cand.rec.last_page = rec_string(e, {"last_page", "last page"});
    out.push_back(std::move(cand));
  }
  return out;
}

}  // namespace

ScholarClient::ScholarClient(gateway::ModelEndpoint endpoint,
                             std::shared_ptr<gateway::CacheStore> cache, int top_k,
                             std::chrono::milliseconds rate_window)
    : endpoint_(std::move(endpoint)),
      cache_(std::move(cache)),
      http_(endpoint_.base_url, endpoint_.auth_env_var, endpoint_.read_timeout_s),
      limiter_(endpoint_.requests_per_minute, rate_window),
      top_k_(top_k) {}

std::vector<CandidateRecord> ScholarClient::run_query(const std::string& kind,
                                                      const std::string& query,
                                                      CandidateSource source) {
  json material;
  material["endpoint"] = endpoint_.name;
  material["op"] = "search";
  material["kind"] = kind;
  material["query"] = text::normalize_text(query);
  material["limit"] = top_k_;

  const gateway::CompletionRecord rec = cache_->get_or_fetch(material.dump(), [&]() {
    const std::string path = "/search?kind=" + kind + "&query=" + url_encode(query) +
                             "&limit=" + std::to_string(top_k_);
    int attempt = 0;
    for (;;) {
      limiter_.acquire();
      const gateway::HttpResponse res = http_.get(path);
      if (res.status == 200) return gateway::FetchResult{res.body, std::nullopt};
      if (res.status == 401 || res.status == 403)
        throw Error(Errc::AuthError, "HTTP " + std::to_string(res.status) + " from search");
      if (attempt >= endpoint_.max_retries)
        throw Error(Errc::SearchUnavailable,
                    "search retries exhausted (last status " + std::to_string(res.status) + ")");
      std::this_thread::sleep_for(
          std::chrono::milliseconds(static_cast<long>(endpoint_.backoff_initial_ms) << attempt));
      ++attempt;
    }
  });
  return parse_results(rec.raw_output, source, top_k_);
}

CandidateSets ScholarClient::search_candidates(const outparse::GeneratedRef& ref) {
  if (text::trim(ref.title).empty())
    throw Error(Errc::InvalidArgument, "search_candidates requires a non-empty title");
  CandidateSets sets;
  sets.by_title = run_query("title", ref.title, CandidateSource::ByTitle);
  if (!ref.authors.empty())
    sets.by_author = run_query("author", ref.authors.front(), CandidateSource::ByAuthor);
  return sets;
}

}  // namespace litrev::refverify
