#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "litrev/corpus.hpp"
#include "litrev/gateway.hpp"
#include "litrev/outparse.hpp"

namespace litrev::refverify {

enum class CandidateSource { ByTitle, ByAuthor };
enum class AuthorMode { AllAuthors, FirstAuthorOnly };

const char* author_mode_name(AuthorMode m);

struct CandidateRecord {
  corpus::RefRecord rec;
  CandidateSource source = CandidateSource::ByTitle;
};

// Per-field correctness bits; index 0 is always the title flag.
struct ElementFlags {
  std::array<bool, 7> e{};

  int sum() const;
  int sum_others() const;  // indices 1..6
  bool& title() { return e[0]; }
  bool title() const { return e[0]; }
};

inline constexpr std::array<const char*, 7> kElementNames = {
    "title", "authors", "venue", "year", "volume", "first_page", "last_page"};

struct VerificationResult {
  outparse::GeneratedRef generated;
  std::optional<CandidateRecord> best_candidate;
  ElementFlags flags;
  bool is_true = false;
  bool title_search_hit = false;
  AuthorMode author_mode = AuthorMode::AllAuthors;
};

struct CandidateSets {
  std::vector<CandidateRecord> by_title;
  std::vector<CandidateRecord> by_author;
};

double title_similarity(const std::string& a, const std::string& b);

// Similarity of normalized titles >= 0.80.
bool title_match(const std::string& a, const std::string& b);

inline constexpr double kTitleMatchThreshold = 0.80;
inline constexpr double kVenueMatchThreshold = 0.90;

// Missing on either side compares false, never vacuously true.
ElementFlags compare_elements(const outparse::GeneratedRef& ref, const CandidateRecord& cand,
                              AuthorMode mode);

// Max flag-sum over by_title then by_author; ties prefer a true title flag,
// then ByTitle source, then input order. No candidates: (nullopt, all-false).
std::pair<std::optional<CandidateRecord>, ElementFlags> select_best_candidate(
    const outparse::GeneratedRef& ref, const CandidateSets& candidates, AuthorMode mode);

// True iff (e0 and at least one other) or (not e0 and at least three others).
bool decide_true(const ElementFlags& flags);

// Mean of is_true over the requested reference count; models that emit fewer
// than requested are penalized by the denominator, extras beyond it are
// ignored.
double accuracy_per_article(const std::vector<VerificationResult>& results, int requested_n);

double accuracy_per_journal(const std::vector<double>& per_article);
double accuracy_per_model(const std::vector<double>& per_journal);

// Hierarchical mean of title_search_hit fractions (article -> journal ->
// model); `flat` instead pools every reference equally.
double title_search_rate(const std::map<std::string, std::vector<double>>& hits_per_journal,
                         bool flat = false);
double flat_title_search_rate(const std::map<std::string, std::vector<std::pair<int, int>>>&
                                  hits_and_totals_per_journal);

// Per-element means over one article's emitted refs; refs without a
// candidate contribute zero everywhere. Empty input yields all zeros.
std::array<double, 7> per_dimension_accuracy(const std::vector<VerificationResult>& results);

// Scholarly search over HTTP behind the service-agnostic contract:
// GET /search?kind=title|author&query=...&limit=k returning ranked records.
class ScholarClient {
public:
  ScholarClient(gateway::ModelEndpoint endpoint, std::shared_ptr<gateway::CacheStore> cache,
                int top_k = 20,
                std::chrono::milliseconds rate_window = gateway::kDefaultRateWindow);

  // Throws Error(SearchUnavailable) when retries are exhausted.
  CandidateSets search_candidates(const outparse::GeneratedRef& ref);

  const gateway::ModelEndpoint& endpoint() const { return endpoint_; }

private:
  std::vector<CandidateRecord> run_query(const std::string& kind, const std::string& query,
                                         CandidateSource source);

  gateway::ModelEndpoint endpoint_;
  std::shared_ptr<gateway::CacheStore> cache_;
  gateway::HttpClient http_;
  gateway::RateLimiter limiter_;
  int top_k_;
};

// Search-and-compare for one generated reference.
VerificationResult verify_reference(const outparse::GeneratedRef& ref, ScholarClient& scholar,
                                    AuthorMode mode);

}  // namespace litrev::refverify
