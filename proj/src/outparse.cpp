#include "litrev/outparse.hpp"

#include <algorithm>
#include <cctype>

#include "litrev/errors.hpp"
#include "litrev/text.hpp"

using nlohmann::json;

namespace litrev::outparse {

namespace {

std::optional<json> try_parse_object(const std::string& s) {
  json j = json::parse(s, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  return j;
}

// Content of the first ``` fence, tolerating a language tag after the ticks.
std::optional<std::string> strip_code_fence(const std::string& s) {
  const size_t open = s.find("```");
  if (open == std::string::npos) return std::nullopt;
  size_t body = s.find('\n', open);
  if (body == std::string::npos) return std::nullopt;
  ++body;
  const size_t close = s.find("```", body);
  if (close == std::string::npos) return s.substr(body);
  return s.substr(body, close - body);
}

std::optional<std::string> trim_to_braces(const std::string& s) {
  const size_t first = s.find('{');
  const size_t last = s.rfind('}');
  if (first == std::string::npos || last == std::string::npos || last < first) return std::nullopt;
  return s.substr(first, last - first + 1);
}

// Quote-aware: commas inside string literals are left alone.
std::string drop_trailing_commas(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  bool in_string = false;
  bool escaped = false;
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      out.push_back(c);
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out.push_back(c);
      continue;
    }
    if (c == ',') {
      size_t k = i + 1;
      while (k < s.size() && std::isspace(static_cast<unsigned char>(s[k]))) ++k;
      if (k < s.size() && (s[k] == '}' || s[k] == ']')) continue;  // drop it
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

ExtractResult extract_json(const std::string& raw) {
  ExtractResult result;
  result.raw = raw;

  if (auto j = try_parse_object(raw)) {
    result.value = std::move(*j);
    result.note = "parsed as-is";
    return result;
  }

  std::string work = raw;
  if (auto fenced = strip_code_fence(work)) {
    work = *fenced;
    if (auto j = try_parse_object(work)) {
      result.value = std::move(*j);
      result.note = "code fence stripped";
      return result;
    }
  }

  if (auto braced = trim_to_braces(work)) {
    work = *braced;
    if (auto j = try_parse_object(work)) {
      result.value = std::move(*j);
      result.note = "trimmed to outer braces";
      return result;
    }
  }

  if (auto j = try_parse_object(drop_trailing_commas(work))) {
    result.value = std::move(*j);
    result.note = "trailing commas removed";
    return result;
  }

  result.note = "no well-formed top-level JSON object";
  return result;
}

namespace {

std::optional<std::string> entry_string(const json& e, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    auto it = e.find(key);
    if (it == e.end() || it->is_null()) continue;
    if (it->is_string()) {
      std::string v = text::trim(it->get<std::string>());
      if (!v.empty()) return v;
    } else if (it->is_number_integer()) {
      return std::to_string(it->get<long long>());
    } else if (it->is_number()) {
      return std::to_string(it->get<double>());
    }
  }
  return std::nullopt;
}

bool is_et_al_token(const std::string& tok) {
  const std::string n = text::normalize_text(tok);
  return n == "et al" || n == "etal";
}

// Strip a trailing "et al" from a single author token; reports whether found.
std::string strip_et_al_suffix(std::string tok, bool& found) {
  const std::string n = text::normalize_text(tok);
  if (n.size() > 6 && n.compare(n.size() - 6, 6, " et al") == 0) {
    const size_t cut = tok.rfind("et");
    if (cut != std::string::npos) {
      tok = text::trim(tok.substr(0, cut));
      found = true;
    }
  }
  return tok;
}

std::vector<std::string> split_authors(const std::string& field, bool& had_et_al) {
  const char sep = field.find(';') != std::string::npos ? ';' : ',';
  std::vector<std::string> out;
  std::string cur;
  for (const char c : field) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  std::vector<std::string> cleaned;
  for (auto& tok : out) {
    std::string t = text::trim(tok);
    if (t.empty()) continue;
    if (is_et_al_token(t)) {
      had_et_al = true;
      continue;
    }
    t = strip_et_al_suffix(t, had_et_al);
    if (!t.empty()) cleaned.push_back(t);
  }
  return cleaned;
}

}  // namespace

std::optional<int> parse_year_field(const std::string& field) {
  int run = 0;
  for (size_t i = 0; i < field.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(field[i]))) {
      ++run;
      if (run == 4) {
        const int year = std::stoi(field.substr(i - 3, 4));
        return year;
      }
    } else {
      run = 0;
    }
  }
  return std::nullopt;
}

ParsedReferences parse_references(const json& value) {
  auto refs_it = value.find("References");
  if (refs_it == value.end()) refs_it = value.find("references");
  if (refs_it == value.end() || !refs_it->is_array())
    throw Error(Errc::NoReferencesKey, "output object has no References array");

  ParsedReferences out;
  size_t idx = 0;
  for (const auto& entry : *refs_it) {
    const size_t entry_no = idx++;
    if (!entry.is_object()) {
      ++out.malformed_entries;
      continue;
    }
    GeneratedRef ref;
    auto title = entry_string(entry, {"title", "Title"});
    if (!title) {
      // Empty titles count as parse failures, never silently dropped.
      ++out.malformed_entries;
      out.missing_fields.push_back("entry " + std::to_string(entry_no) + ": title");
      continue;
    }
    ref.title = *title;

    auto note_missing = [&](const char* field) {
      out.missing_fields.push_back("entry " + std::to_string(entry_no) + ": " + field);
    };

    auto authors_it = entry.find("authors");
    if (authors_it == entry.end()) authors_it = entry.find("Authors");
    if (authors_it == entry.end() || authors_it->is_null()) {
      note_missing("authors");
    } else if (authors_it->is_array()) {
      for (const auto& a : *authors_it) {
        if (!a.is_string()) continue;
        std::string t = text::trim(a.get<std::string>());
        if (t.empty()) continue;
        if (is_et_al_token(t)) {
          out.had_et_al = true;
          continue;
        }
        t = strip_et_al_suffix(t, out.had_et_al);
        if (!t.empty()) ref.authors.push_back(t);
      }
    } else if (authors_it->is_string()) {
      ref.authors = split_authors(authors_it->get<std::string>(), out.had_et_al);
    }

    ref.venue = entry_string(entry, {"journal", "Journal", "venue"});
    if (!ref.venue) note_missing("journal");

    if (auto y = entry_string(entry, {"year", "Year"})) {
      ref.year = parse_year_field(*y);
      if (!ref.year) note_missing("year");
    } else {
      note_missing("year");
    }

    ref.volume = entry_string(entry, {"volumes", "volume", "Volumes", "Volume"});
    if (!ref.volume) note_missing("volumes");
    ref.first_page = entry_string(entry, {"first page", "first_page", "firstpage", "First page"});
    if (!ref.first_page) note_missing("first page");
    ref.last_page = entry_string(entry, {"last page", "last_page", "lastpage", "Last page"});
    if (!ref.last_page) note_missing("last page");

    out.refs.push_back(std::move(ref));
  }
  return out;
}

std::string normalize_title(const std::string& title) { return text::normalize_text(title); }

CanonicalAuthor normalize_author(const std::string& name) {
  CanonicalAuthor out;
  const std::string trimmed = text::trim(name);
  if (trimmed.empty()) return out;

  std::string family_part;
  std::string given_part;
  const size_t comma = trimmed.find(',');
  if (comma != std::string::npos) {
    family_part = text::trim(trimmed.substr(0, comma));
    given_part = text::trim(trimmed.substr(comma + 1));
  } else {
    std::vector<std::string> tokens;
    std::string cur;
    for (const char c : trimmed) {
      if (std::isspace(static_cast<unsigned char>(c))) {
        if (!cur.empty()) tokens.push_back(std::move(cur));
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));

    auto is_initial_like = [](const std::string& tok) {
      size_t alpha = 0;
      bool has_dot = false;
      for (const char c : tok) {
        if (c == '.') has_dot = true;
        if (std::isalpha(static_cast<unsigned char>(c))) ++alpha;
      }
      return has_dot || alpha <= 1;
    };

    std::vector<std::string> non_initials;
    std::vector<std::string> initials;
    for (const auto& t : tokens) (is_initial_like(t) ? initials : non_initials).push_back(t);

    if (non_initials.empty()) {
      if (!tokens.empty()) family_part = tokens.back();
      if (tokens.size() > 1) given_part = tokens.front();
    } else if (non_initials.size() == 1) {
      family_part = non_initials.front();
      if (!initials.empty()) given_part = initials.front();
    } else {
      family_part = non_initials.back();
      given_part = non_initials.front();
    }
  }

  out.family = text::normalize_text(family_part);
  const std::string given_norm = text::normalize_text(given_part);
  if (!given_norm.empty() && std::isalpha(static_cast<unsigned char>(given_norm[0])))
    out.given_initial = given_norm[0];
  return out;
}

bool authors_equivalent(const CanonicalAuthor& a, const CanonicalAuthor& b) {
  if (a.family != b.family) return false;
  if (!a.given_initial || !b.given_initial) return true;
  return *a.given_initial == *b.given_initial;
}

ParsedOutput parse_task_output(const std::string& raw, taskgen::TaskKind task) {
  ParsedOutput out;
  out.raw = raw;
  ExtractResult extracted = extract_json(raw);
  if (!extracted.ok()) {
    out.note = extracted.note;
    return out;
  }
  const json& obj = *extracted.value;

  auto find_text = [&](std::initializer_list<const char*> keys) -> std::optional<std::string> {
    for (const char* key : keys) {
      auto it = obj.find(key);
      if (it != obj.end() && it->is_string()) return it->get<std::string>();
    }
    return std::nullopt;
  };

  switch (task) {
    case taskgen::TaskKind::Task1_References: {
      try {
        out.references = parse_references(obj);
      } catch (const Error&) {
        out.note = "no References array";
        return out;
      }
      out.parsed = true;
      out.note = extracted.note;
      return out;
    }
    case taskgen::TaskKind::Task2_Abstract: {
      auto text_val = find_text({"Abstract", "abstract"});
      if (!text_val) {
        out.note = "no Abstract field";
        return out;
      }
      out.text = std::move(*text_val);
      out.parsed = true;
      out.note = extracted.note;
      return out;
    }
    case taskgen::TaskKind::Task3_Review: {
      auto review = find_text({"Literature Review", "Literature review", "literature review",
                               "Review", "review"});
      ParsedReferences refs;
      bool have_refs = true;
      try {
        refs = parse_references(obj);
      } catch (const Error&) {
        have_refs = false;
      }
      if (!review && !have_refs) {
        out.note = "neither review text nor References present";
        return out;
      }
      // Reference count deviations are scored outcomes, not errors.
      out.references = std::move(refs);
      out.text = review.value_or("");
      out.parsed = true;
      out.note = extracted.note;
      return out;
    }
  }
  out.note = "unknown task";
  return out;
}

PagePair parse_pages(const std::optional<std::string>& fp, const std::optional<std::string>& lp) {
  auto leading_int = [](const std::string& s) -> std::optional<long> {
    const std::string t = text::trim(s);
    size_t i = 0;
    while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
    if (i == 0) return std::nullopt;
    return std::stol(t.substr(0, i));
  };

  PagePair out;
  if (fp && (!lp || text::trim(*lp).empty())) {
    // A single "123-145" style range; dashes may be unicode.
    static const std::vector<std::string> dashes = {"-", "‐", "‒", "–",
                                                    "—", "―", "−"};
    for (const auto& dash : dashes) {
      const size_t at = fp->find(dash);
      if (at != std::string::npos && at > 0) {
        const std::string left = fp->substr(0, at);
        const std::string right = fp->substr(at + dash.size());
        const auto l = leading_int(left);
        const auto r = leading_int(right);
        if (l && r) {
          out.first = l;
          out.last = r;
          return out;
        }
      }
    }
  }
  if (fp) out.first = leading_int(*fp);
  if (lp) out.last = leading_int(*lp);
  return out;
}

}  // namespace litrev::outparse
