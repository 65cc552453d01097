#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "litrev/corpus.hpp"
#include "litrev/refverify.hpp"

namespace litrev::analytics {

struct OverlapResult {
  double title_acc = 0.0;
  double overlap = 0.0;
  double overlap_first_author = 0.0;
  std::array<double, 7> per_dimension{};
};

// Every generated ref against every human ref; the human reference list
// plays the candidate-set role and the usual truth rule applies.
OverlapResult overlap_with_human(const std::vector<outparse::GeneratedRef>& generated,
                                 const std::vector<corpus::RefRecord>& human,
                                 refverify::AuthorMode mode);

struct AnovaResult {
  double f_stat = 0.0;
  double p_value = 1.0;
  int df_between = 0;
  int df_within = 0;
  bool degenerate = false;  // zero within-variance: F reported as infinite, p = 0
};

std::map<std::string, std::vector<double>> group_by_discipline(
    const std::map<std::string, double>& per_article_scores, const corpus::Corpus& corpus);

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups);

// Survival function of the F distribution via the regularized incomplete
// beta function.
double f_upper_tail(double f, int df1, int df2);

double regularized_incomplete_beta(double a, double b, double x);

}  // namespace litrev::analytics
