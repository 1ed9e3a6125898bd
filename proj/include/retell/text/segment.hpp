#pragma once

#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "retell/core/error.hpp"
#include "retell/core/text.hpp"
#include "retell/text/sentence.hpp"

namespace retell::text {

namespace detail {

inline constexpr std::array<std::string_view, 17> kTitleAbbreviations = {
    "mr", "mrs", "ms", "dr", "prof", "st", "sr", "jr", "mt", "capt",
    "gen", "lt", "col", "sgt", "rev", "hon", "vs"};

inline bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

inline bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

inline bool opens_sentence(char c) {
  auto u = static_cast<unsigned char>(c);
  return std::isupper(u) || std::isdigit(u) || c == '"' || c == '\'' || c == '(' || c == '[' ||
         u >= 0x80;  // UTF-8 lead byte, typically a curly quote
}

// True when the period at `dot` ends a title ("Mr.") or an initial ("J.").
inline bool is_abbreviation(std::string_view s, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && is_word_char(s[b - 1])) --b;
  if (b == dot) return false;
  auto word = s.substr(b, dot - b);
  if (word.size() == 1 && std::isupper(static_cast<unsigned char>(word[0]))) return true;
  const std::string lower = to_lower(word);
  for (auto a : kTitleAbbreviations) {
    if (lower == a) return true;
  }
  return false;
}

}  // namespace detail

// Splits on terminal punctuation followed by whitespace and a sentence
// opener. Units carry trimmed raw text and its [begin, end) span; the text
// between consecutive spans is whitespace only.
inline std::vector<SentenceUnit> segment_sentences(std::string_view text) {
  if (is_blank(text)) fail(ErrorCode::empty_input, "segment_sentences: empty text");

  std::vector<SentenceUnit> units;
  auto emit = [&](std::size_t b, std::size_t e) {
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    if (b == e) return;
    SentenceUnit u;
    u.index = static_cast<int>(units.size());
    u.raw = std::string(text.substr(b, e - b));
    u.resolved = u.raw;
    u.span = {b, e};
    units.push_back(std::move(u));
  };

  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!detail::is_terminal(text[i])) {
      ++i;
      continue;
    }
    const std::size_t first_mark = i;
    while (i < text.size() && detail::is_terminal(text[i])) ++i;
    while (i < text.size() && detail::is_closer(text[i])) ++i;
    const std::size_t end = i;

    if (end == text.size()) break;
    if (!is_space(text[end])) continue;
    std::size_t next = end;
    while (next < text.size() && is_space(text[next])) ++next;
    if (next == text.size()) break;
    if (!detail::opens_sentence(text[next])) continue;
    if (end - first_mark == 1 && text[first_mark] == '.' && detail::is_abbreviation(text, first_mark)) {
      continue;
    }
    emit(start, end);
    start = next;
    i = next;
  }
  emit(start, text.size());
  return units;
}

}  // namespace retell::text
