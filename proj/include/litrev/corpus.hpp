#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace litrev::corpus {

struct RefRecord {
  std::string title;
  std::vector<std::string> authors;
  std::string venue;
  std::optional<int> year;
  std::optional<std::string> volume;
  std::optional<std::string> first_page;
  std::optional<std::string> last_page;
};

enum class Discipline {
  Biology,
  Chemistry,
  Mathematics,
  Physics,
  SocialScience,
  Technology,
};

const char* discipline_name(Discipline d);
std::optional<Discipline> parse_discipline(const std::string& name);
inline constexpr int kDisciplineCount = 6;

struct ArticleRecord {
  std::string id;
  std::string journal_id;
  std::string title;
  std::vector<std::string> keywords;
  std::string abstract;
  std::string body;
  std::vector<RefRecord> references;
  std::optional<Discipline> discipline;
};

// Immutable after load; journals keyed and iterated in sorted order so every
// downstream fold is deterministic regardless of file order.
struct Corpus {
  std::map<std::string, std::vector<ArticleRecord>> journals;

  size_t journal_count() const { return journals.size(); }
  size_t article_count() const;
  const ArticleRecord* find_article(const std::string& id) const;

  template <typename Fn>
  void for_each_article(Fn&& fn) const {
    for (const auto& [jid, articles] : journals)
      for (const auto& a : articles) fn(jid, a);
  }
};

using DisciplineMap = std::map<std::string, Discipline>;

struct CorpusStats {
  std::map<std::string, size_t> per_journal;
  std::map<std::string, size_t> per_discipline;
  size_t total = 0;
};

// Newline-delimited JSON, one article per line. Throws Error with
// MalformedRecord (line + field), DuplicateId, or EmptyCorpus.
Corpus load_corpus(const std::string& path);
Corpus parse_corpus_jsonl(const std::string& content);
std::string serialize_corpus(const Corpus& corpus);

DisciplineMap load_discipline_map(const std::string& path);

// Returns a copy with every article labeled. Throws UnmappedJournal listing
// journals absent from the map.
Corpus assign_disciplines(const Corpus& corpus, const DisciplineMap& map);

CorpusStats corpus_stats(const Corpus& corpus);

// Deterministic synthetic corpus: fixed seed, fixed content. Articles draw
// references from a shared synthetic literature universe so that search and
// overlap paths see repeated records.
Corpus synth_corpus(uint64_t seed, int journals, int articles_per_journal);

// The universe behind synth_corpus's references, usable as a search index.
std::vector<RefRecord> synth_universe(uint64_t seed, int journals, int articles_per_journal);

}  // namespace litrev::corpus
