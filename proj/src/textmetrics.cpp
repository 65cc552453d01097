#include "litrev/textmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "litrev/errors.hpp"
#include "litrev/text.hpp"

namespace litrev::textmetrics {

std::vector<std::string> tokenize(const std::string& s) { return text::fold_tokens(s); }

namespace {

double harmonic_f1(double precision, double recall) {
  const double sum = precision + recall;
  if (sum == 0.0) return 0.0;
  return 2.0 * precision * recall / sum;
}

std::map<std::string, long> ngram_counts(const std::vector<std::string>& tokens, int n) {
  std::map<std::string, long> counts;
  if (static_cast<int>(tokens.size()) < n) return counts;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key.push_back('\x1f');
      key += tokens[i + k];
    }
    ++counts[key];
  }
  return counts;
}

}  // namespace

RougeScore rouge_n(const std::string& candidate, const std::string& reference, int n) {
  if (n != 1 && n != 2) throw Error(Errc::InvalidArgument, "rouge_n supports n in {1,2}");
  const auto cand = ngram_counts(tokenize(candidate), n);
  const auto ref = ngram_counts(tokenize(reference), n);
  long cand_total = 0;
  long ref_total = 0;
  for (const auto& [k, c] : cand) cand_total += c;
  for (const auto& [k, c] : ref) ref_total += c;

  long clipped = 0;
  for (const auto& [k, c] : cand) {
    auto it = ref.find(k);
    if (it != ref.end()) clipped += std::min(c, it->second);
  }

  RougeScore score;
  score.precision = cand_total > 0 ? static_cast<double>(clipped) / cand_total : 0.0;
  score.recall = ref_total > 0 ? static_cast<double>(clipped) / ref_total : 0.0;
  score.f1 = harmonic_f1(score.precision, score.recall);
  return score;
}

RougeScore rouge_l(const std::string& candidate, const std::string& reference) {
  const auto cand = tokenize(candidate);
  const auto ref = tokenize(reference);
  RougeScore score;
  if (cand.empty() || ref.empty()) return score;

  std::vector<size_t> row(ref.size() + 1, 0);
  for (size_t i = 1; i <= cand.size(); ++i) {
    size_t prev_diag = 0;
    for (size_t j = 1; j <= ref.size(); ++j) {
      const size_t cur = row[j];
      if (cand[i - 1] == ref[j - 1]) {
        row[j] = prev_diag + 1;
      } else {
        row[j] = std::max(row[j], row[j - 1]);
      }
      prev_diag = cur;
    }
  }
  const auto lcs = static_cast<double>(row[ref.size()]);
  score.precision = lcs / static_cast<double>(cand.size());
  score.recall = lcs / static_cast<double>(ref.size());
  score.f1 = harmonic_f1(score.precision, score.recall);
  return score;
}

double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size())
    throw Error(Errc::InvalidArgument, "cosine_similarity needs equal dimensions");
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw Error(Errc::ZeroVector, "cosine of a zero vector");
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

EntailRollup entail_rollup(const std::map<std::string, int>& per_article,
                           const corpus::Corpus& corpus, bool allow_missing) {
  EntailRollup out;
  std::vector<std::string> missing;
  double journal_sum = 0.0;
  size_t journal_count = 0;
  for (const auto& [jid, articles] : corpus.journals) {
    double sum = 0.0;
    size_t scored = 0;
    for (const auto& a : articles) {
      auto it = per_article.find(a.id);
      if (it == per_article.end()) {
        missing.push_back(a.id);
        continue;
      }
      sum += it->second;
      ++scored;
    }
    if (scored == 0) continue;
    const double mean = sum / static_cast<double>(scored);
    out.per_journal[jid] = mean;
    journal_sum += mean;
    ++journal_count;
  }
  if (!missing.empty() && !allow_missing) {
    std::string msg = "articles without judgments:";
    for (const auto& id : missing) msg += " " + id;
    throw Error(Errc::MissingScores, msg);
  }
  out.missing = std::move(missing);
  out.per_model = journal_count > 0 ? journal_sum / static_cast<double>(journal_count) : 0.0;
  return out;
}

}  // namespace litrev::textmetrics
