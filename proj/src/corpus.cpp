#include "litrev/corpus.hpp"

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "litrev/errors.hpp"
#include "litrev/text.hpp"

using nlohmann::json;

namespace litrev::corpus {

const char* discipline_name(Discipline d) {
  switch (d) {
    case Discipline::Biology: return "Biology";
    case Discipline::Chemistry: return "Chemistry";
    case Discipline::Mathematics: return "Mathematics";
    case Discipline::Physics: return "Physics";
    case Discipline::SocialScience: return "SocialScience";
    case Discipline::Technology: return "Technology";
  }
  return "Unknown";
}

std::optional<Discipline> parse_discipline(const std::string& name) {
  const std::string key = text::normalize_text(name);
  if (key == "biology") return Discipline::Biology;
  if (key == "chemistry") return Discipline::Chemistry;
  if (key == "mathematics") return Discipline::Mathematics;
  if (key == "physics") return Discipline::Physics;
  if (key == "socialscience" || key == "social science") return Discipline::SocialScience;
  if (key == "technology") return Discipline::Technology;
  return std::nullopt;
}

size_t Corpus::article_count() const {
  size_t n = 0;
  for (const auto& [jid, articles] : journals) n += articles.size();
  return n;
}

const ArticleRecord* Corpus::find_article(const std::string& id) const {
  for (const auto& [jid, articles] : journals)
    for (const auto& a : articles)
      if (a.id == id) return &a;
  return nullptr;
}

namespace {

[[noreturn]] void malformed(size_t line, const std::string& field, const std::string& why) {
  throw Error(Errc::MalformedRecord,
              "line " + std::to_string(line) + ", field '" + field + "': " + why);
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) return std::nullopt;
  std::string v = it->get<std::string>();
  if (text::trim(v).empty()) return std::nullopt;
  return v;
}

std::optional<int> opt_year(const json& j, size_t line, size_t ref_idx) {
  auto it = j.find("year");
  if (it == j.end() || it->is_null()) return std::nullopt;
  int year = 0;
  if (it->is_number_integer()) {
    year = it->get<int>();
  } else if (it->is_string()) {
    const std::string s = text::trim(it->get<std::string>());
    if (s.empty()) return std::nullopt;
    try {
      year = std::stoi(s);
    } catch (const std::exception&) {
      malformed(line, "references[" + std::to_string(ref_idx) + "].year", "not an integer");
    }
  } else {
    malformed(line, "references[" + std::to_string(ref_idx) + "].year", "not an integer");
  }
  if (year < 1500 || year > 2100) {
    malformed(line, "references[" + std::to_string(ref_idx) + "].year",
              "outside 1500..2100: " + std::to_string(year));
  }
  return year;
}

RefRecord parse_ref(const json& j, size_t line, size_t ref_idx) {
  const std::string where = "references[" + std::to_string(ref_idx) + "]";
  if (!j.is_object()) malformed(line, where, "not an object");
  RefRecord r;
  if (auto t = opt_string(j, "title")) {
    r.title = *t;
  } else {
    malformed(line, where + ".title", "missing or empty");
  }
  if (auto it = j.find("authors"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) malformed(line, where + ".authors", "not an array");
    for (const auto& a : *it) {
      if (!a.is_string() || text::trim(a.get<std::string>()).empty())
        malformed(line, where + ".authors", "empty author entry");
      r.authors.push_back(a.get<std::string>());
    }
  }
  if (auto v = opt_string(j, "venue")) r.venue = *v;
  r.year = opt_year(j, line, ref_idx);
  r.volume = opt_string(j, "volume");
  r.first_page = opt_string(j, "first_page");
  r.last_page = opt_string(j, "last_page");
  return r;
}

ArticleRecord parse_article(const json& j, size_t line) {
  ArticleRecord a;
  if (!j.is_object()) malformed(line, "<record>", "not a JSON object");
  auto need_string = [&](const char* key) {
    auto v = opt_string(j, key);
    if (!v) malformed(line, key, "missing or empty");
    return *v;
  };
  a.id = need_string("id");
  a.journal_id = need_string("journal_id");
  a.title = need_string("title");
  a.abstract = need_string("abstract");
  if (auto it = j.find("body"); it != j.end() && it->is_string()) a.body = it->get<std::string>();
  if (auto it = j.find("keywords"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) malformed(line, "keywords", "not an array");
    for (const auto& k : *it) {
      if (!k.is_string()) malformed(line, "keywords", "non-string entry");
      a.keywords.push_back(k.get<std::string>());
    }
  }
  if (auto it = j.find("discipline"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) malformed(line, "discipline", "not a string");
    auto d = parse_discipline(it->get<std::string>());
    if (!d) malformed(line, "discipline", "unknown label '" + it->get<std::string>() + "'");
    a.discipline = d;
  }
  auto refs = j.find("references");
  if (refs == j.end() || !refs->is_array() || refs->empty())
    malformed(line, "references", "missing or empty (a review with zero citations is rejected)");
  for (size_t i = 0; i < refs->size(); ++i) a.references.push_back(parse_ref((*refs)[i], line, i));
  return a;
}

json ref_to_json(const RefRecord& r) {
  json j;
  j["title"] = r.title;
  j["authors"] = r.authors;
  j["venue"] = r.venue;
  if (r.year) j["year"] = *r.year;
  if (r.volume) j["volume"] = *r.volume;
  if (r.first_page) j["first_page"] = *r.first_page;
  if (r.last_page) j["last_page"] = *r.last_page;
  return j;
}

}  // namespace

Corpus parse_corpus_jsonl(const std::string& content) {
  Corpus corpus;
  std::set<std::string> seen_ids;
  std::istringstream in(content);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      malformed(lineno, "<record>", e.what());
    }
    ArticleRecord a = parse_article(j, lineno);
    if (!seen_ids.insert(a.id).second)
      throw Error(Errc::DuplicateId, "article id '" + a.id + "' at line " + std::to_string(lineno));
    corpus.journals[a.journal_id].push_back(std::move(a));
  }
  if (corpus.journals.empty()) throw Error(Errc::EmptyCorpus, "no articles found");
  return corpus;
}

Corpus load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot open corpus file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus_jsonl(buf.str());
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  corpus.for_each_article([&](const std::string&, const ArticleRecord& a) {
    json j;
    j["id"] = a.id;
    j["journal_id"] = a.journal_id;
    j["title"] = a.title;
    j["keywords"] = a.keywords;
    j["abstract"] = a.abstract;
    j["body"] = a.body;
    if (a.discipline) j["discipline"] = discipline_name(*a.discipline);
    json refs = json::array();
    for (const auto& r : a.references) refs.push_back(ref_to_json(r));
    j["references"] = std::move(refs);
    out += j.dump();
    out += '\n';
  });
  return out;
}

DisciplineMap load_discipline_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot open discipline map: " + path);
  DisciplineMap map;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      malformed(lineno, "<discipline map>", e.what());
    }
    if (!j.contains("journal_id") || !j.contains("discipline"))
      malformed(lineno, "<discipline map>", "needs journal_id and discipline");
    auto d = parse_discipline(j["discipline"].get<std::string>());
    if (!d) malformed(lineno, "discipline", "unknown label");
    map[j["journal_id"].get<std::string>()] = *d;
  }
  return map;
}

Corpus assign_disciplines(const Corpus& corpus, const DisciplineMap& map) {
  std::vector<std::string> missing;
  for (const auto& [jid, articles] : corpus.journals)
    if (!map.count(jid)) missing.push_back(jid);
  if (!missing.empty()) {
    std::string msg = "journals without discipline:";
    for (const auto& m : missing) msg += " " + m;
    throw Error(Errc::UnmappedJournal, msg);
  }
  Corpus out = corpus;
  for (auto& [jid, articles] : out.journals) {
    const Discipline d = map.at(jid);
    for (auto& a : articles) a.discipline = d;
  }
  return out;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  for (const auto& [jid, articles] : corpus.journals) {
    stats.per_journal[jid] = articles.size();
    stats.total += articles.size();
    for (const auto& a : articles)
      if (a.discipline) ++stats.per_discipline[discipline_name(*a.discipline)];
  }
  return stats;
}

namespace {

// Deterministic across platforms: raw mt19937_64 draws only, no
// std::uniform_int_distribution (its mapping is implementation-defined).
class Rng {
public:
  explicit Rng(uint64_t seed) : gen_(seed) {}
  uint64_t next(uint64_t bound) { return gen_() % bound; }

private:
  std::mt19937_64 gen_;
};

const std::vector<std::string>& topic_words() {
  static const std::vector<std::string> w = {
      "adaptive",  "bayesian",   "catalytic",  "cellular",   "cognitive", "collective",
      "dynamic",   "ecological", "economic",   "emergent",   "genomic",   "geometric",
      "kinetic",   "magnetic",   "membrane",   "microbial",  "molecular", "neural",
      "nonlinear", "orbital",    "oxidative",  "polymeric",  "quantum",   "regulatory",
      "seismic",   "social",     "spectral",   "stochastic", "synaptic",  "thermal",
      "analysis",  "assembly",   "behavior",   "circuits",   "dynamics",  "evolution",
      "feedback",  "gradients",  "inference",  "landscapes", "mechanisms", "models",
      "networks",  "pathways",   "plasticity", "responses",  "signaling", "structures",
      "systems",   "transport"};
  return w;
}

const std::vector<std::string>& family_names() {
  static const std::vector<std::string> w = {
      "Alvarez", "Bennett", "Chen",   "Dubois", "Eriksen", "Fischer", "Garcia", "Hoffman",
      "Ivanov",  "Jensen",  "Kumar",  "Larsen", "Moreau",  "Nakamura", "Okafor", "Petrov",
      "Quinn",   "Rossi",   "Suzuki", "Tanaka", "Ueda",    "Vasquez", "Weber",  "Xu",
      "Yamada",  "Zhang"};
  return w;
}

const std::vector<std::string>& given_names() {
  static const std::vector<std::string> w = {
      "Alice", "Boris", "Carla", "Daniel", "Elena", "Felix", "Grace", "Hugo",
      "Ines",  "Jonas", "Keiko", "Liam",   "Mara",  "Noah",  "Olga",  "Pavel",
      "Rosa",  "Simon", "Tara",  "Victor", "Wei",   "Yara"};
  return w;
}

const std::vector<std::string>& venue_names() {
  static const std::vector<std::string> w = {
      "Journal of Synthetic Studies",
      "Synthetic Review Letters",
      "Annals of Generated Research",
      "Proceedings of the Fixture Society",
      "International Journal of Sample Science",
      "Quarterly Bulletin of Test Data",
      "Archives of Deterministic Methods",
      "Transactions on Reproducible Results"};
  return w;
}

std::string make_phrase(Rng& rng, int words, bool title_case) {
  const auto& vocab = topic_words();
  std::string out;
  for (int i = 0; i < words; ++i) {
    std::string w = vocab[rng.next(vocab.size())];
    if (title_case && i == 0) w[0] = static_cast<char>(std::toupper(w[0]));
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::string make_sentences(Rng& rng, int target_words) {
  std::string out;
  int words = 0;
  while (words < target_words) {
    const int len = 8 + static_cast<int>(rng.next(7));
    std::string s = make_phrase(rng, len, true);
    s += '.';
    if (!out.empty()) out += ' ';
    out += s;
    words += len;
  }
  return out;
}

RefRecord make_universe_ref(Rng& rng, size_t idx) {
  RefRecord r;
  r.title = make_phrase(rng, 4 + static_cast<int>(rng.next(5)), true) + " " +
            std::to_string(100 + idx);
  const int n_authors = 1 + static_cast<int>(rng.next(4));
  for (int i = 0; i < n_authors; ++i) {
    r.authors.push_back(given_names()[rng.next(given_names().size())] + " " +
                        family_names()[rng.next(family_names().size())]);
  }
  r.venue = venue_names()[rng.next(venue_names().size())];
  r.year = 1985 + static_cast<int>(rng.next(39));
  r.volume = std::to_string(1 + rng.next(120));
  const int fp = 1 + static_cast<int>(rng.next(900));
  const int lp = fp + 5 + static_cast<int>(rng.next(40));
  r.first_page = std::to_string(fp);
  r.last_page = std::to_string(lp);
  return r;
}

}  // namespace

std::vector<RefRecord> synth_universe(uint64_t seed, int journals, int articles_per_journal) {
  Rng rng(seed * 0x9E3779B97F4A7C15ULL + 1);
  const size_t size = static_cast<size_t>(journals) * articles_per_journal * 4 + 40;
  std::vector<RefRecord> universe;
  universe.reserve(size);
  for (size_t i = 0; i < size; ++i) universe.push_back(make_universe_ref(rng, i));
  return universe;
}

Corpus synth_corpus(uint64_t seed, int journals, int articles_per_journal) {
  if (journals < 1 || articles_per_journal < 1)
    throw Error(Errc::InvalidArgument, "journals and articles_per_journal must be >= 1");
  const std::vector<RefRecord> universe = synth_universe(seed, journals, articles_per_journal);
  Rng rng(seed);
  Corpus corpus;
  for (int j = 0; j < journals; ++j) {
    char jid[32];
    std::snprintf(jid, sizeof(jid), "synthj%02d", j);
    std::vector<ArticleRecord>& articles = corpus.journals[jid];
    for (int i = 0; i < articles_per_journal; ++i) {
      ArticleRecord a;
      a.journal_id = jid;
      a.id = std::string(jid) + "-a" + std::to_string(i);
      a.title = make_phrase(rng, 5 + static_cast<int>(rng.next(4)), true) + " " +
                std::to_string(j * 1000 + i);
      const int n_kw = 3 + static_cast<int>(rng.next(4));
      for (int k = 0; k < n_kw; ++k)
        a.keywords.push_back(topic_words()[rng.next(topic_words().size())]);
      a.abstract = make_sentences(rng, 80 + static_cast<int>(rng.next(60)));
      a.body = make_sentences(rng, 200 + static_cast<int>(rng.next(100)));
      const int n_refs = 8 + static_cast<int>(rng.next(8));
      std::set<size_t> picked;
      while (static_cast<int>(picked.size()) < n_refs) picked.insert(rng.next(universe.size()));
      for (size_t idx : picked) a.references.push_back(universe[idx]);
      articles.push_back(std::move(a));
    }
  }
  return corpus;
}

}  // namespace litrev::corpus
