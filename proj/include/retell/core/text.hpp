#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace retell::text {

struct Token {
  std::string text;   // as written
  std::string lower;  // ASCII-lowercased
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive byte offset
};

inline bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

inline bool is_blank(std::string_view s) { return trim(s).empty(); }

// Alphanumeric runs; an apostrophe between two word characters stays inside
// the token ("don't", "harbor's"). Hyphens and other punctuation split.
inline std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_word_char(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size()) {
      if (is_word_char(s[j])) {
        ++j;
      } else if (s[j] == '\'' && j + 1 < s.size() && is_word_char(s[j + 1]) && j > i) {
        ++j;
      } else {
        break;
      }
    }
    Token t;
    t.text = std::string(s.substr(i, j - i));
    t.lower = to_lower(t.text);
    t.begin = i;
    t.end = j;
    tokens.push_back(std::move(t));
    i = j;
  }
  return tokens;
}

// Whitespace-delimited chunks that contain at least one word character.
inline std::size_t word_count(std::string_view s) {
  std::size_t count = 0;
  bool in_chunk = false;
  bool has_word = false;
  for (char c : s) {
    if (is_space(c)) {
      if (in_chunk && has_word) ++count;
      in_chunk = has_word = false;
    } else {
      in_chunk = true;
      has_word = has_word || is_word_char(c);
    }
  }
  if (in_chunk && has_word) ++count;
  return count;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace retell::text
