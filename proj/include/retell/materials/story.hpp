#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "retell/core/digest.hpp"
#include "retell/core/error.hpp"
#include "retell/core/text.hpp"
#include "retell/text/inflection.hpp"

namespace retell::materials {

using nlohmann::json;

struct TargetWord {
  std::string surface;                   // lowercase, no whitespace
  std::vector<std::string> definitions;  // bilingual glosses, supplied data
  std::optional<std::string> phonetic;

  bool operator==(const TargetWord&) const = default;
};

struct WordSet {
  std::string id;
  std::vector<TargetWord> words;

  bool operator==(const WordSet&) const = default;
};

enum class Provenance { generated, imported };

struct Story {
  std::string id;
  std::string text;
  WordSet word_set;
  int max_words = 60;
  Provenance provenance = Provenance::imported;

  bool operator==(const Story&) const = default;
};

struct ValidationReport {
  std::vector<std::string> missing;
  std::size_t word_count = 0;
  bool over_length = false;  // word_count > 1.5 * max_words

  bool ok() const { return missing.empty() && !over_length; }
};

inline TargetWord make_target_word(std::string_view surface,
                                   std::vector<std::string> definitions = {},
                                   std::optional<std::string> phonetic = std::nullopt) {
  auto s = std::string(text::trim(surface));
  require(!s.empty(), "target word is empty");
  for (char c : s) require(!text::is_space(c), "target word contains whitespace: " + s);
  return {text::to_lower(s), std::move(definitions), std::move(phonetic)};
}

inline void validate_word_set(const WordSet& ws) {
  require(!ws.words.empty(), "word set is empty");
  std::vector<std::string> seen;
  for (const auto& w : ws.words) {
    require(!w.surface.empty(), "target word is empty");
    for (char c : w.surface) require(!text::is_space(c), "target word contains whitespace");
    auto lower = text::to_lower(w.surface);
    require(std::find(seen.begin(), seen.end(), lower) == seen.end(),
            "duplicate target word: " + lower);
    seen.push_back(lower);
  }
}

inline std::string derive_word_set_id(const std::vector<TargetWord>& words) {
  std::vector<std::string> lower;
  for (const auto& w : words) lower.push_back(text::to_lower(w.surface));
  return "words-" + sha256_hex(text::join(lower, ",")).substr(0, 12);
}

inline WordSet make_word_set(const std::vector<std::string>& surfaces, std::string id = "") {
  WordSet ws;
  for (const auto& s : surfaces) ws.words.push_back(make_target_word(s));
  ws.id = id.empty() ? derive_word_set_id(ws.words) : std::move(id);
  validate_word_set(ws);
  return ws;
}

inline std::string derive_story_id(const std::string& story_text, const WordSet& ws) {
  std::string key = story_text + "\x1f" + ws.id;
  for (const auto& w : ws.words) key += "\x1f" + w.surface;
  return "story-" + sha256_hex(key).substr(0, 12);
}

// Presence uses the same inflection-tolerant matcher as spoken-word
// detection, so materials and feedback agree on what "contains" means.
inline ValidationReport validate_story(const Story& story) {
  ValidationReport report;
  const auto tokens = text::token_set(story.text);
  for (const auto& w : story.word_set.words) {
    if (!text::contains_word(tokens, w.surface)) report.missing.push_back(w.surface);
  }
  report.word_count = text::word_count(story.text);
  report.over_length = 2 * report.word_count > 3 * static_cast<std::size_t>(story.max_words);
  return report;
}

// JSON

inline void to_json(json& j, const TargetWord& w) {
  j = {{"surface", w.surface}, {"definitions", w.definitions}};
  if (w.phonetic) j["phonetic"] = *w.phonetic;
}

// A bare string is accepted as a word without definitions.
inline void from_json(const json& j, TargetWord& w) {
  if (j.is_string()) {
    w = make_target_word(j.get<std::string>());
    return;
  }
  w = make_target_word(j.at("surface").get<std::string>(),
                       j.value("definitions", std::vector<std::string>{}),
                       j.contains("phonetic") && !j["phonetic"].is_null()
                           ? std::optional<std::string>(j["phonetic"].get<std::string>())
                           : std::nullopt);
}

inline void to_json(json& j, const WordSet& ws) { j = {{"id", ws.id}, {"words", ws.words}}; }

inline void from_json(const json& j, WordSet& ws) {
  j.at("words").get_to(ws.words);
  ws.id = j.value("id", std::string{});
  if (ws.id.empty()) ws.id = derive_word_set_id(ws.words);
  validate_word_set(ws);
}

inline std::string to_string(Provenance p) {
  return p == Provenance::generated ? "generated" : "imported";
}

inline Provenance provenance_from_string(const std::string& s) {
  if (s == "generated") return Provenance::generated;
  if (s == "imported") return Provenance::imported;
  fail(ErrorCode::invalid_argument, "unknown provenance: " + s);
}

inline void to_json(json& j, const Story& s) {
  j = {{"id", s.id},
       {"text", s.text},
       {"max_words", s.max_words},
       {"provenance", to_string(s.provenance)},
       {"word_set", s.word_set}};
}

inline void from_json(const json& j, Story& s) {
  s.text = j.at("text").get<std::string>();
  j.at("word_set").get_to(s.word_set);
  s.max_words = j.value("max_words", 60);
  require(s.max_words > 0, "max_words must be positive");
  s.provenance = provenance_from_string(j.value("provenance", std::string("imported")));
  s.id = j.value("id", std::string{});
  if (s.id.empty()) s.id = derive_story_id(s.text, s.word_set);
}

inline json to_json(const ValidationReport& r) {
  return {{"missing", r.missing}, {"word_count", r.word_count}, {"over_length", r.over_length}};
}

}  // namespace retell::materials
