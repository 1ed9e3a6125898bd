#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "retell/backends/interfaces.hpp"
#include "retell/core/text.hpp"
#include "retell/text/pronouns.hpp"
#include "retell/text/sentence.hpp"
#include "retell/text/stopwords.hpp"

namespace retell::text {

namespace detail {

inline bool starts_with_article(std::string_view mention) {
  auto toks = tokenize(mention);
  if (toks.empty()) return false;
  const auto& w = toks.front().lower;
  return w == "a" || w == "an" || w == "the" || w == "this" || w == "that" || w == "these" ||
         w == "those" || w == "some" || w == "one" || w == "two" || w == "three";
}

// Only quotes or brackets sit between the sentence start and `pos`.
inline bool at_sentence_start(std::string_view text, const Span& sentence, std::size_t pos) {
  for (auto p = sentence.begin; p < pos; ++p) {
    if (is_word_char(text[p])) return false;
  }
  return true;
}

inline bool her_is_possessive(std::string_view text, const Token& her, const Token* next) {
  if (next == nullptr) return false;
  for (auto p = her.end; p < next->begin; ++p) {
    if (!is_space(text[p])) return false;
  }
  return !is_stopword(next->lower);
}

inline std::string replacement_for(std::string_view text, const Span& sentence, const Token& pronoun,
                                   const Token* next, std::string mention, PronounInfo info) {
  if (mention.empty()) return mention;
  if (at_sentence_start(text, sentence, pronoun.begin)) {
    mention[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(mention[0])));
  } else if (starts_with_article(mention)) {
    mention[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(mention[0])));
  }
  bool possessive = info.grammatical_case == PronounCase::possessive ||
                    (info.grammatical_case == PronounCase::ambiguous_object_possessive &&
                     her_is_possessive(text, pronoun, next));
  if (possessive) mention += (mention.back() == 's' ? "'" : "'s");
  return mention;
}

}  // namespace detail

// Replaces third-person pronouns that the resolver links to an earlier,
// non-pronoun mention with that cluster's representative text. Pronouns
// without such a link stay as written and are listed as unresolved. Any
// resolver failure (or malformed output) yields the raw sentences with
// `degraded` set; it never throws.
inline Preprocessed resolve_coreferences(std::vector<SentenceUnit> units, std::string_view story_text,
                                         backends::CorefResolver& resolver) {
  Preprocessed out;
  for (auto& u : units) {
    u.resolved = u.raw;
    u.substitutions.clear();
    u.unresolved_pronouns.clear();
  }

  std::vector<backends::CorefCluster> clusters;
  try {
    clusters = resolver.resolve(std::string(story_text));
    for (const auto& c : clusters) {
      auto in_range = [&](const Span& s) { return s.begin < s.end && s.end <= story_text.size(); };
      if (!in_range(c.main)) throw std::out_of_range("cluster main span out of range");
      for (const auto& m : c.mentions) {
        if (!in_range(m)) throw std::out_of_range("mention span out of range");
      }
    }
  } catch (const std::exception&) {
    out.sentences = std::move(units);
    out.degraded = true;
    return out;
  }

  auto antecedent_for = [&](const Token& tok) -> std::optional<std::string> {
    for (const auto& c : clusters) {
      for (const auto& m : c.mentions) {
        if (m.begin != tok.begin || m.end != tok.end) continue;
        if (c.main.end > tok.begin) return std::nullopt;
        auto main_text = std::string(story_text.substr(c.main.begin, c.main.end - c.main.begin));
        if (third_person_pronoun(to_lower(main_text))) return std::nullopt;
        return main_text;
      }
    }
    return std::nullopt;
  };

  for (auto& u : units) {
    const auto sentence = story_text.substr(u.span.begin, u.span.end - u.span.begin);
    auto toks = tokenize(sentence);
    std::string resolved;
    std::size_t copied = 0;  // offset in sentence
    for (std::size_t i = 0; i < toks.size(); ++i) {
      auto info = third_person_pronoun(toks[i].lower);
      if (!info) continue;
      Token global = toks[i];
      global.begin += u.span.begin;
      global.end += u.span.begin;
      auto main_text = antecedent_for(global);
      if (!main_text) {
        u.unresolved_pronouns.push_back(toks[i].text);
        continue;
      }
      std::optional<Token> next;
      if (i + 1 < toks.size()) {
        next = toks[i + 1];
        next->begin += u.span.begin;
        next->end += u.span.begin;
      }
      auto replacement = detail::replacement_for(story_text, u.span, global,
                                                 next ? &*next : nullptr, *main_text, *info);
      resolved += sentence.substr(copied, toks[i].begin - copied);
      u.substitutions.push_back({resolved.size(), replacement.size(), toks[i].text, replacement});
      resolved += replacement;
      copied = toks[i].end;
    }
    resolved += sentence.substr(copied);
    u.resolved = std::move(resolved);
  }
  out.sentences = std::move(units);
  return out;
}

// Inverse of the substitution step: puts the pronouns back.
inline std::string unresolve(const SentenceUnit& unit) {
  std::string s = unit.resolved;
  for (auto it = unit.substitutions.rbegin(); it != unit.substitutions.rend(); ++it) {
    s.replace(it->offset, it->length, it->pronoun);
  }
  return s;
}

}  // namespace retell::text
