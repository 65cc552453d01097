#include "litrev/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "litrev/errors.hpp"

namespace litrev::text {

char32_t decode_utf8(std::string_view s, size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return 0xFFFD;
  }
  if (pos + len > s.size()) {
    ++pos;
    return 0xFFFD;
  }
  for (int i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += len;
  return cp;
}

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\v':
    case U'\f':
    case 0x0085:
    case 0x00A0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

int count_words(std::string_view s) {
  int words = 0;
  bool in_word = false;
  size_t pos = 0;
  while (pos < s.size()) {
    const char32_t cp = decode_utf8(s, pos);
    if (is_unicode_space(cp)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  return words;
}

namespace {

struct FoldEntry {
  char32_t cp;
  const char* out;
};

// Latin-1 Supplement and Latin Extended-A, lowercased ASCII equivalents.
constexpr std::array<FoldEntry, 123> kFoldTable{{
    {0x00C0, "a"}, {0x00C1, "a"}, {0x00C2, "a"}, {0x00C3, "a"}, {0x00C4, "a"}, {0x00C5, "a"},
    {0x00C6, "ae"}, {0x00C7, "c"}, {0x00C8, "e"}, {0x00C9, "e"}, {0x00CA, "e"}, {0x00CB, "e"},
    {0x00CC, "i"}, {0x00CD, "i"}, {0x00CE, "i"}, {0x00CF, "i"}, {0x00D0, "d"}, {0x00D1, "n"},
    {0x00D2, "o"}, {0x00D3, "o"}, {0x00D4, "o"}, {0x00D5, "o"}, {0x00D6, "o"}, {0x00D8, "o"},
    {0x00D9, "u"}, {0x00DA, "u"}, {0x00DB, "u"}, {0x00DC, "u"}, {0x00DD, "y"}, {0x00DE, "th"},
    {0x00DF, "ss"},
    {0x00E0, "a"}, {0x00E1, "a"}, {0x00E2, "a"}, {0x00E3, "a"}, {0x00E4, "a"}, {0x00E5, "a"},
    {0x00E6, "ae"}, {0x00E7, "c"}, {0x00E8, "e"}, {0x00E9, "e"}, {0x00EA, "e"}, {0x00EB, "e"},
    {0x00EC, "i"}, {0x00ED, "i"}, {0x00EE, "i"}, {0x00EF, "i"}, {0x00F0, "d"}, {0x00F1, "n"},
    {0x00F2, "o"}, {0x00F3, "o"}, {0x00F4, "o"}, {0x00F5, "o"}, {0x00F6, "o"}, {0x00F8, "o"},
    {0x00F9, "u"}, {0x00FA, "u"}, {0x00FB, "u"}, {0x00FC, "u"}, {0x00FD, "y"}, {0x00FE, "th"},
    {0x00FF, "y"},
    {0x0100, "a"}, {0x0101, "a"}, {0x0102, "a"}, {0x0103, "a"}, {0x0104, "a"}, {0x0105, "a"},
    {0x0106, "c"}, {0x0107, "c"}, {0x0108, "c"}, {0x0109, "c"}, {0x010A, "c"}, {0x010B, "c"},
    {0x010C, "c"}, {0x010D, "c"}, {0x010E, "d"}, {0x010F, "d"}, {0x0110, "d"}, {0x0111, "d"},
    {0x0112, "e"}, {0x0113, "e"}, {0x0116, "e"}, {0x0117, "e"}, {0x0118, "e"}, {0x0119, "e"},
    {0x011A, "e"}, {0x011B, "e"}, {0x011C, "g"}, {0x011D, "g"}, {0x011E, "g"}, {0x011F, "g"},
    {0x0122, "g"}, {0x0123, "g"}, {0x0124, "h"}, {0x0125, "h"}, {0x0130, "i"}, {0x0131, "i"},
    {0x0139, "l"}, {0x013A, "l"}, {0x0141, "l"}, {0x0142, "l"}, {0x0143, "n"}, {0x0144, "n"},
    {0x0147, "n"}, {0x0148, "n"}, {0x0150, "o"}, {0x0151, "o"}, {0x0152, "oe"}, {0x0153, "oe"},
    {0x0154, "r"}, {0x0155, "r"}, {0x0158, "r"}, {0x0159, "r"}, {0x015A, "s"}, {0x015B, "s"},
    {0x015E, "s"}, {0x015F, "s"}, {0x0160, "s"}, {0x0161, "s"}, {0x0162, "t"}, {0x0163, "t"},
    {0x0164, "t"}, {0x0165, "t"}, {0x016A, "u"}, {0x016B, "u"}, {0x016E, "u"}, {0x016F, "u"},
    {0x0170, "u"}, {0x0171, "u"}, {0x0179, "z"}, {0x017A, "z"}, {0x017B, "z"}, {0x017C, "z"},
    {0x017D, "z"}, {0x017E, "z"},
}};

}  // namespace

std::string ascii_fold(char32_t cp) {
  for (const auto& e : kFoldTable) {
    if (e.cp == cp) return e.out;
  }
  return {};
}

std::string normalize_text(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  auto push = [&](char c) {
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  };
  size_t pos = 0;
  while (pos < s.size()) {
    const char32_t cp = decode_utf8(s, pos);
    if (cp < 0x80) {
      const char c = static_cast<char>(cp);
      if (std::isalnum(static_cast<unsigned char>(c))) {
        push(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      } else {
        pending_space = true;
      }
    } else {
      const std::string folded = ascii_fold(cp);
      if (folded.empty()) {
        pending_space = true;
      } else {
        for (char c : folded) push(c);
      }
    }
  }
  return out;
}

std::vector<std::string> fold_tokens(std::string_view s) {
  std::vector<std::string> tokens;
  std::string cur;
  for (const char c : s) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || uc >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(uc)));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  std::vector<size_t> row(a.size() + 1);
  for (size_t i = 0; i <= a.size(); ++i) row[i] = i;
  for (size_t j = 1; j <= b.size(); ++j) {
    size_t prev_diag = row[0];
    row[0] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
      const size_t cur = row[i];
      row[i] = std::min({row[i] + 1, row[i - 1] + 1, prev_diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      prev_diag = cur;
    }
  }
  return row[a.size()];
}

double edit_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  const size_t d = levenshtein(a, b);
  return 1.0 - static_cast<double>(d) / static_cast<double>(std::max(a.size(), b.size()));
}

std::string to_lower_ascii(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace litrev::text

namespace litrev {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedRecord: return "MalformedRecord";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::EmptyCorpus: return "EmptyCorpus";
    case Errc::UnmappedJournal: return "UnmappedJournal";
    case Errc::UnassignedDiscipline: return "UnassignedDiscipline";
    case Errc::AuthError: return "AuthError";
    case Errc::RateLimited: return "RateLimited";
    case Errc::TransportError: return "TransportError";
    case Errc::EmptyResponse: return "EmptyResponse";
    case Errc::JudgeFormatError: return "JudgeFormatError";
    case Errc::SearchUnavailable: return "SearchUnavailable";
    case Errc::NoReferencesKey: return "NoReferencesKey";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::MissingScores: return "MissingScores";
    case Errc::ConfigError: return "ConfigError";
    case Errc::FatalStorageError: return "FatalStorageError";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace litrev
