#pragma once

#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "retell/core/text.hpp"

namespace retell::text {

namespace detail {

inline bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

// consonant-vowel-consonant ending where the last consonant may double
// ("stop" -> "stopped"); w, x and y never double.
inline bool doubles_final_consonant(std::string_view w) {
  if (w.size() < 3) return false;
  char c3 = w[w.size() - 1], c2 = w[w.size() - 2], c1 = w[w.size() - 3];
  if (c3 == 'w' || c3 == 'x' || c3 == 'y') return false;
  return !is_vowel(c3) && is_vowel(c2) && !is_vowel(c1);
}

}  // namespace detail

// Regular inflections of a lowercase surface form: plural -s/-es, -ed,
// -ing, -er, with e-drop, consonant doubling and consonant+y -> i.
inline std::set<std::string> inflections(std::string_view surface) {
  const std::string w = to_lower(surface);
  std::set<std::string> forms{w};
  if (w.empty()) return forms;
  forms.insert(w + "s");
  forms.insert(w + "es");
  forms.insert(w + "ed");
  forms.insert(w + "ing");
  forms.insert(w + "er");
  const char last = w.back();
  const std::string stem = w.substr(0, w.size() - 1);
  if (last == 'e') {
    forms.insert(w + "d");
    forms.insert(w + "r");
    forms.insert(stem + "ing");
  }
  if (last == 'y' && w.size() > 1 && !detail::is_vowel(w[w.size() - 2])) {
    forms.insert(stem + "ies");
    forms.insert(stem + "ied");
    forms.insert(stem + "ier");
  }
  if (detail::doubles_final_consonant(w)) {
    const std::string doubled = w + last;
    forms.insert(doubled + "ed");
    forms.insert(doubled + "ing");
    forms.insert(doubled + "er");
  }
  return forms;
}

// Lowercased tokens of `s`, plus each token with a possessive "'s" removed.
inline std::unordered_set<std::string> token_set(std::string_view s) {
  std::unordered_set<std::string> out;
  for (const auto& t : tokenize(s)) {
    out.insert(t.lower);
    if (t.lower.size() > 2 && t.lower.ends_with("'s")) {
      out.insert(t.lower.substr(0, t.lower.size() - 2));
    }
  }
  return out;
}

inline bool contains_word(const std::unordered_set<std::string>& tokens, std::string_view surface) {
  for (const auto& form : inflections(surface)) {
    if (tokens.contains(form)) return true;
  }
  return false;
}

// Whole-token, case-insensitive, inflection-tolerant presence test.
inline bool contains_word(std::string_view s, std::string_view surface) {
  return contains_word(token_set(s), surface);
}

}  // namespace retell::text
