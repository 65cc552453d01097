#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace litrev::text {

// Decodes one UTF-8 code point starting at `pos`; advances `pos` past it.
// Malformed bytes decode as U+FFFD and advance by one byte.
char32_t decode_utf8(std::string_view s, size_t& pos);

bool is_unicode_space(char32_t cp);

// Whitespace-delimited token count; punctuation stays attached to tokens.
int count_words(std::string_view s);

// Transliterates Latin-1 Supplement / Latin Extended-A letters to ASCII
// ("é" -> "e", "ß" -> "ss"); returns empty for anything else non-ASCII.
std::string ascii_fold(char32_t cp);

// Casefold, drop punctuation and diacritics, collapse whitespace runs to a
// single space. Output is ASCII [a-z0-9 ] and trimmed.
std::string normalize_text(std::string_view s);

// Casefolded tokens split on non-alphanumeric runs. Bytes >= 0x80 are kept
// as token characters so non-Latin words survive intact.
std::vector<std::string> fold_tokens(std::string_view s);

size_t levenshtein(std::string_view a, std::string_view b);

// 1 - dist/max_len; 1.0 when both empty, 0.0 when exactly one is empty.
double edit_similarity(std::string_view a, std::string_view b);

std::string to_lower_ascii(std::string s);
std::string trim(std::string_view s);

}  // namespace litrev::text
