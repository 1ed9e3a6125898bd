#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace retell::text {

// One pronoun replaced in a sentence. `offset`/`length` locate the
// replacement inside `resolved`, so the raw sentence can be restored.
struct Substitution {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::string pronoun;
  std::string replacement;

  bool operator==(const Substitution&) const = default;
};

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Span&) const = default;
};

struct SentenceUnit {
  int index = 0;
  std::string raw;
  std::string resolved;
  Span span;
  std::vector<std::string> unresolved_pronouns;
  std::vector<Substitution> substitutions;

  bool operator==(const SentenceUnit&) const = default;
};

// Output of the preprocessing sub-step for one story.
struct Preprocessed {
  std::vector<SentenceUnit> sentences;
  bool degraded = false;  // resolver failed; resolved == raw everywhere

  bool operator==(const Preprocessed&) const = default;
};

inline void to_json(nlohmann::json& j, const Substitution& s) {
  j = {{"offset", s.offset}, {"length", s.length}, {"pronoun", s.pronoun}, {"replacement", s.replacement}};
}

inline void from_json(const nlohmann::json& j, Substitution& s) {
  j.at("offset").get_to(s.offset);
  j.at("length").get_to(s.length);
  j.at("pronoun").get_to(s.pronoun);
  j.at("replacement").get_to(s.replacement);
}

inline void to_json(nlohmann::json& j, const SentenceUnit& u) {
  j = {{"index", u.index},
       {"raw", u.raw},
       {"resolved", u.resolved},
       {"span", {u.span.begin, u.span.end}},
       {"unresolved_pronouns", u.unresolved_pronouns},
       {"substitutions", u.substitutions}};
}

inline void from_json(const nlohmann::json& j, SentenceUnit& u) {
  j.at("index").get_to(u.index);
  j.at("raw").get_to(u.raw);
  u.resolved = j.value("resolved", u.raw);
  const auto& span = j.at("span");
  u.span = {span.at(0).get<std::size_t>(), span.at(1).get<std::size_t>()};
  u.unresolved_pronouns = j.value("unresolved_pronouns", std::vector<std::string>{});
  u.substitutions = j.value("substitutions", std::vector<Substitution>{});
}

inline void to_json(nlohmann::json& j, const Preprocessed& p) {
  j = {{"sentences", p.sentences}, {"degraded", p.degraded}};
}

inline void from_json(const nlohmann::json& j, Preprocessed& p) {
  j.at("sentences").get_to(p.sentences);
  p.degraded = j.value("degraded", false);
}

}  // namespace retell::text
