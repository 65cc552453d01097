#pragma once

#include <map>
#include <string>
#include <vector>

#include "litrev/corpus.hpp"

namespace litrev::textmetrics {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

std::vector<std::string> tokenize(const std::string& text);

RougeScore rouge_n(const std::string& candidate, const std::string& reference, int n);
RougeScore rouge_l(const std::string& candidate, const std::string& reference);

double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v);

struct EntailRollup {
  std::map<std::string, double> per_journal;
  double per_model = 0.0;
  std::vector<std::string> missing;  // populated only when gaps are allowed
};

// Journal mean then cross-journal mean; journals weigh equally regardless of
// size. With allow_missing=false, articles lacking judgments raise
// Error(MissingScores) listing them.
EntailRollup entail_rollup(const std::map<std::string, int>& per_article,
                           const corpus::Corpus& corpus, bool allow_missing = false);

}  // namespace litrev::textmetrics
