#pragma once

#include <optional>
#include <string_view>

namespace retell::text {

enum class Gender { male, female, neuter, plural };

enum class PronounCase { subject, object, possessive, ambiguous_object_possessive };

struct PronounInfo {
  Gender gender;
  PronounCase grammatical_case;
};

// Third-person personal pronouns eligible for substitution. Reflexives and
// standalone possessives ("hers", "theirs") are left alone.
inline std::optional<PronounInfo> third_person_pronoun(std::string_view lower) {
  if (lower == "he") return PronounInfo{Gender::male, PronounCase::subject};
  if (lower == "him") return PronounInfo{Gender::male, PronounCase::object};
  if (lower == "his") return PronounInfo{Gender::male, PronounCase::possessive};
  if (lower == "she") return PronounInfo{Gender::female, PronounCase::subject};
  if (lower == "her") return PronounInfo{Gender::female, PronounCase::ambiguous_object_possessive};
  if (lower == "it") return PronounInfo{Gender::neuter, PronounCase::subject};
  if (lower == "its") return PronounInfo{Gender::neuter, PronounCase::possessive};
  if (lower == "they") return PronounInfo{Gender::plural, PronounCase::subject};
  if (lower == "them") return PronounInfo{Gender::plural, PronounCase::object};
  if (lower == "their") return PronounInfo{Gender::plural, PronounCase::possessive};
  return std::nullopt;
}

}  // namespace retell::text
