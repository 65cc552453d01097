#include "litrev/refverify.hpp"

#include <algorithm>
#include <numeric>

#include "litrev/errors.hpp"
#include "litrev/text.hpp"

namespace litrev::refverify {

const char* author_mode_name(AuthorMode m) {
  return m == AuthorMode::AllAuthors ? "all_authors" : "first_author";
}

int ElementFlags::sum() const {
  int n = 0;
  for (const bool b : e) n += b ? 1 : 0;
  return n;
}

int ElementFlags::sum_others() const {
  int n = 0;
  for (size_t i = 1; i < e.size(); ++i) n += e[i] ? 1 : 0;
  return n;
}

double title_similarity(const std::string& a, const std::string& b) {
  return text::edit_similarity(outparse::normalize_title(a), outparse::normalize_title(b));
}

bool title_match(const std::string& a, const std::string& b) {
  return title_similarity(a, b) >= kTitleMatchThreshold;
}

namespace {

bool authors_match(const std::vector<std::string>& gen, const std::vector<std::string>& cand,
                   AuthorMode mode) {
  if (gen.empty() || cand.empty()) return false;
  if (mode == AuthorMode::FirstAuthorOnly) {
    return outparse::authors_equivalent(outparse::normalize_author(gen.front()),
                                        outparse::normalize_author(cand.front()));
  }
  if (gen.size() != cand.size()) return false;
  std::vector<outparse::CanonicalAuthor> a;
  std::vector<outparse::CanonicalAuthor> b;
  a.reserve(gen.size());
  b.reserve(cand.size());
  for (const auto& s : gen) a.push_back(outparse::normalize_author(s));
  for (const auto& s : cand) b.push_back(outparse::normalize_author(s));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (size_t i = 0; i < a.size(); ++i)
    if (!outparse::authors_equivalent(a[i], b[i])) return false;
  return true;
}

bool venues_match(const std::optional<std::string>& gen, const std::string& cand) {
  if (!gen || cand.empty()) return false;
  const std::string a = outparse::normalize_venue(*gen);
  const std::string b = outparse::normalize_venue(cand);
  if (a.empty() || b.empty()) return false;
  if (a == b) return true;
  return text::edit_similarity(a, b) >= kVenueMatchThreshold;
}

std::string normalize_volume(const std::string& v) {
  std::string n = text::normalize_text(v);
  // Pure digit strings compare numerically ("07" == "7").
  if (!n.empty() && n.find_first_not_of("0123456789") == std::string::npos) {
    size_t i = 0;
    while (i + 1 < n.size() && n[i] == '0') ++i;
    return n.substr(i);
  }
  return n;
}

bool volumes_match(const std::optional<std::string>& gen, const std::optional<std::string>& cand) {
  if (!gen || !cand) return false;
  const std::string a = normalize_volume(*gen);
  const std::string b = normalize_volume(*cand);
  return !a.empty() && a == b;
}

bool pages_match(const std::optional<std::string>& gen, const std::optional<std::string>& cand) {
  if (!gen || !cand) return false;
  const outparse::PagePair a = outparse::parse_pages(gen, std::nullopt);
  const outparse::PagePair b = outparse::parse_pages(cand, std::nullopt);
  if (a.first && b.first) return *a.first == *b.first;
  // Electronic pages and other non-numeric forms: exact trimmed, casefolded.
  return text::to_lower_ascii(text::trim(*gen)) == text::to_lower_ascii(text::trim(*cand));
}

}  // namespace

ElementFlags compare_elements(const outparse::GeneratedRef& ref, const CandidateRecord& cand,
                              AuthorMode mode) {
  ElementFlags flags;
  const corpus::RefRecord& c = cand.rec;
  flags.e[0] = !ref.title.empty() && !c.title.empty() && title_match(ref.title, c.title);
  flags.e[1] = authors_match(ref.authors, c.authors, mode);
  flags.e[2] = venues_match(ref.venue, c.venue);
  flags.e[3] = ref.year && c.year && *ref.year == *c.year;
  flags.e[4] = volumes_match(ref.volume, c.volume);
  flags.e[5] = pages_match(ref.first_page, c.first_page);
  flags.e[6] = pages_match(ref.last_page, c.last_page);
  return flags;
}

std::pair<std::optional<CandidateRecord>, ElementFlags> select_best_candidate(
    const outparse::GeneratedRef& ref, const CandidateSets& candidates, AuthorMode mode) {
  std::optional<CandidateRecord> best;
  ElementFlags best_flags;
  int best_sum = -1;
  bool best_title = false;
  bool best_by_title = false;

  auto consider = [&](const CandidateRecord& cand) {
    const ElementFlags flags = compare_elements(ref, cand, mode);
    const int sum = flags.sum();
    const bool by_title = cand.source == CandidateSource::ByTitle;
    bool better = false;
    if (sum > best_sum) {
      better = true;
    } else if (sum == best_sum) {
      if (flags.title() != best_title) {
        better = flags.title();
      } else if (by_title != best_by_title) {
        better = by_title;
      }
      // Equal on all tie keys: keep the earlier candidate.
    }
    if (better) {
      best = cand;
      best_flags = flags;
      best_sum = sum;
      best_title = flags.title();
      best_by_title = by_title;
    }
  };

  for (const auto& c : candidates.by_title) consider(c);
  for (const auto& c : candidates.by_author) consider(c);
  if (!best) return {std::nullopt, ElementFlags{}};
  return {best, best_flags};
}

bool decide_true(const ElementFlags& flags) {
  const int others = flags.sum_others();
  if (flags.title()) return others >= 1;
  return others >= 3;
}

double accuracy_per_article(const std::vector<VerificationResult>& results, int requested_n) {
  if (requested_n < 1) throw Error(Errc::InvalidArgument, "requested_n must be >= 1");
  int truths = 0;
  int counted = 0;
  for (const auto& r : results) {
    if (counted == requested_n) break;
    ++counted;
    if (r.is_true) ++truths;
  }
  return static_cast<double>(truths) / static_cast<double>(requested_n);
}

double accuracy_per_journal(const std::vector<double>& per_article) {
  if (per_article.empty())
    throw Error(Errc::InvalidArgument, "accuracy_per_journal over empty list");
  return std::accumulate(per_article.begin(), per_article.end(), 0.0) /
         static_cast<double>(per_article.size());
}

double accuracy_per_model(const std::vector<double>& per_journal) {
  if (per_journal.empty())
    throw Error(Errc::InvalidArgument, "accuracy_per_model over empty list");
  return std::accumulate(per_journal.begin(), per_journal.end(), 0.0) /
         static_cast<double>(per_journal.size());
}

double title_search_rate(const std::map<std::string, std::vector<double>>& hits_per_journal,
                         bool flat) {
  if (hits_per_journal.empty())
    throw Error(Errc::InvalidArgument, "title_search_rate over empty input");
  if (flat) {
    double sum = 0.0;
    size_t n = 0;
    for (const auto& [jid, fractions] : hits_per_journal) {
      sum = std::accumulate(fractions.begin(), fractions.end(), sum);
      n += fractions.size();
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
  }
  double journal_sum = 0.0;
  size_t journals = 0;
  for (const auto& [jid, fractions] : hits_per_journal) {
    if (fractions.empty()) continue;
    journal_sum += std::accumulate(fractions.begin(), fractions.end(), 0.0) /
                   static_cast<double>(fractions.size());
    ++journals;
  }
  if (journals == 0) throw Error(Errc::InvalidArgument, "title_search_rate over empty journals");
  return journal_sum / static_cast<double>(journals);
}

double flat_title_search_rate(
    const std::map<std::string, std::vector<std::pair<int, int>>>& hits_and_totals_per_journal) {
  long hits = 0;
  long total = 0;
  for (const auto& [jid, articles] : hits_and_totals_per_journal) {
    for (const auto& [h, n] : articles) {
      hits += h;
      total += n;
    }
  }
  return total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

std::array<double, 7> per_dimension_accuracy(const std::vector<VerificationResult>& results) {
  std::array<double, 7> out{};
  if (results.empty()) return out;
  for (const auto& r : results) {
    for (size_t d = 0; d < 7; ++d)
      if (r.flags.e[d]) out[d] += 1.0;
  }
  for (auto& v : out) v /= static_cast<double>(results.size());
  return out;
}

VerificationResult verify_reference(const outparse::GeneratedRef& ref, ScholarClient& scholar,
                                    AuthorMode mode) {
  VerificationResult result;
  result.generated = ref;
  result.author_mode = mode;
  const CandidateSets sets = scholar.search_candidates(ref);
  result.title_search_hit = !sets.by_title.empty();
  auto [best, flags] = select_best_candidate(ref, sets, mode);
  result.best_candidate = std::move(best);
  result.flags = flags;
  result.is_true = result.best_candidate && decide_true(flags);
  return result;
}

}  // namespace litrev::refverify
