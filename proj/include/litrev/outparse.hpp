#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "litrev/taskgen.hpp"

namespace litrev::outparse {

struct GeneratedRef {
  std::string title;
  std::vector<std::string> authors;
  std::optional<std::string> venue;
  std::optional<int> year;
  std::optional<std::string> volume;
  std::optional<std::string> first_page;
  std::optional<std::string> last_page;
};

struct GeneratedAbstract {
  std::string article_id;
  std::string text;
  int word_count = 0;
};

struct GeneratedReview {
  std::string article_id;
  std::string review_text;
  std::vector<GeneratedRef> references;
};

// Never throws on arbitrary text: either a value or a recorded failure.
struct ExtractResult {
  std::optional<nlohmann::json> value;
  std::string raw;   // preserved verbatim for the audit log
  std::string note;  // which repair pass succeeded, or why extraction failed
  bool ok() const { return value.has_value(); }
};

// First well-formed top-level object after repair passes: strip code fences,
// trim prose before the first '{' and after the last '}', fix trailing commas.
ExtractResult extract_json(const std::string& raw);

struct ParsedReferences {
  std::vector<GeneratedRef> refs;               // input order preserved
  int malformed_entries = 0;                    // unusable entries (recorded, not thrown)
  std::vector<std::string> missing_fields;      // "entry 3: volumes" style notes
  bool had_et_al = false;                       // schema deviation: prompt forbids "et al."
};

// Throws Error(NoReferencesKey) when the object has no "References" array.
ParsedReferences parse_references(const nlohmann::json& value);

struct CanonicalAuthor {
  std::string family;
  std::optional<char> given_initial;

  bool operator<(const CanonicalAuthor& o) const {
    if (family != o.family) return family < o.family;
    return given_initial.value_or('\0') < o.given_initial.value_or('\0');
  }
  bool operator==(const CanonicalAuthor& o) const = default;
};

std::string normalize_title(const std::string& title);
CanonicalAuthor normalize_author(const std::string& name);
std::string normalize_venue(const std::string& venue);

// Same family and compatible initials (a missing initial matches any).
bool authors_equivalent(const CanonicalAuthor& a, const CanonicalAuthor& b);

struct PagePair {
  std::optional<long> first;
  std::optional<long> last;
};

// Leading integers; a range like "123-145" in `fp` is split when `lp` is
// missing. Electronic pages ("e1234") carry no integer and stay string-only.
PagePair parse_pages(const std::optional<std::string>& fp, const std::optional<std::string>& lp);

std::optional<int> parse_year_field(const std::string& field);

// One raw model output in, one recorded outcome out; never throws on
// arbitrary text. Unparseable outputs keep the raw text for the audit log
// and score as zero downstream rather than being excluded.
struct ParsedOutput {
  bool parsed = false;
  std::string raw;
  std::string note;
  std::optional<ParsedReferences> references;  // tasks 1 and 3
  std::optional<std::string> text;             // task 2 abstract, task 3 review body
};

ParsedOutput parse_task_output(const std::string& raw, taskgen::TaskKind task);

}  // namespace litrev::outparse
