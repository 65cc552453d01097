#include "litrev/analytics.hpp"

#include <cmath>
#include <limits>

#include "litrev/errors.hpp"

namespace litrev::analytics {

OverlapResult overlap_with_human(const std::vector<outparse::GeneratedRef>& generated,
                                 const std::vector<corpus::RefRecord>& human,
                                 refverify::AuthorMode mode) {
  if (human.empty()) throw Error(Errc::InvalidArgument, "human reference list is empty");
  OverlapResult out;
  if (generated.empty()) return out;

  refverify::CandidateSets sets;
  sets.by_title.reserve(human.size());
  for (const auto& h : human) sets.by_title.push_back({h, refverify::CandidateSource::ByTitle});

  int title_hits = 0;
  int true_hits = 0;
  int true_hits_first = 0;
  std::array<double, 7> dim_sums{};
  for (const auto& g : generated) {
    auto [best, flags] = refverify::select_best_candidate(g, sets, mode);
    if (flags.title()) ++title_hits;
    if (best && refverify::decide_true(flags)) ++true_hits;
    for (size_t d = 0; d < 7; ++d)
      if (flags.e[d]) dim_sums[d] += 1.0;

    auto [best_first, flags_first] =
        refverify::select_best_candidate(g, sets, refverify::AuthorMode::FirstAuthorOnly);
    if (best_first && refverify::decide_true(flags_first)) ++true_hits_first;
  }

  const auto n = static_cast<double>(generated.size());
  out.title_acc = title_hits / n;
  out.overlap = true_hits / n;
  out.overlap_first_author = true_hits_first / n;
  for (size_t d = 0; d < 7; ++d) out.per_dimension[d] = dim_sums[d] / n;
  return out;
}

std::map<std::string, std::vector<double>> group_by_discipline(
    const std::map<std::string, double>& per_article_scores, const corpus::Corpus& corpus) {
  std::map<std::string, std::vector<double>> groups;
  corpus.for_each_article([&](const std::string&, const corpus::ArticleRecord& a) {
    auto it = per_article_scores.find(a.id);
    if (it == per_article_scores.end()) return;
    if (!a.discipline)
      throw Error(Errc::UnassignedDiscipline, "article without discipline: " + a.id);
    groups[corpus::discipline_name(*a.discipline)].push_back(it->second);
  });
  return groups;
}

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw Error(Errc::InvalidArgument, "one_way_anova needs >= 2 groups");
  size_t n = 0;
  double grand_sum = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2)
      throw Error(Errc::InvalidArgument, "one_way_anova needs >= 2 values per group");
    for (const double v : g) grand_sum += v;
    n += g.size();
  }
  const double grand_mean = grand_sum / static_cast<double>(n);

  double ss_between = 0.0;
  double ss_within = 0.0;
  for (const auto& g : groups) {
    double sum = 0.0;
    for (const double v : g) sum += v;
    const double mean = sum / static_cast<double>(g.size());
    ss_between += static_cast<double>(g.size()) * (mean - grand_mean) * (mean - grand_mean);
    for (const double v : g) ss_within += (v - mean) * (v - mean);
  }

  AnovaResult out;
  out.df_between = static_cast<int>(groups.size()) - 1;
  out.df_within = static_cast<int>(n - groups.size());
  const double ms_between = ss_between / out.df_between;
  const double ms_within = ss_within / out.df_within;
  if (ms_within == 0.0) {
    // DegenerateGroups: reported, not thrown.
    out.degenerate = true;
    out.f_stat = std::numeric_limits<double>::infinity();
    out.p_value = 0.0;
    return out;
  }
  out.f_stat = ms_between / ms_within;
  out.p_value = f_upper_tail(out.f_stat, out.df_between, out.df_within);
  return out;
}

namespace {

// Continued fraction for the incomplete beta function (Lentz's method).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 400;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double f_upper_tail(double f, int df1, int df2) {
  if (df1 < 1 || df2 < 1) throw Error(Errc::InvalidArgument, "degrees of freedom must be >= 1");
  if (f < 0.0) throw Error(Errc::InvalidArgument, "f must be nonnegative");
  if (f == 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double x = df2 / (df2 + df1 * f);
  return regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, x);
}

}  // namespace litrev::analytics
