#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "retell/core/digest.hpp"
#include "retell/text/prompts.hpp"

namespace retell::image {

using nlohmann::json;

struct ImageCandidate {
  int prompt_index = 0;
  int candidate_index = 0;
  std::string image_ref;
  double similarity = 0.0;  // raw cosine in [-1, 1]

  bool operator==(const ImageCandidate&) const = default;
};

struct ManifestEntry {
  int sentence_index = 0;  // -1 for the whole-story entry
  std::string prompt;
  std::optional<std::vector<std::string>> keywords;
  std::string selection_text;  // text the candidates were ranked against
  std::vector<ImageCandidate> candidates;
  int selected_index = 0;
  std::string stylized_ref;
  bool style_degraded = false;

  bool operator==(const ManifestEntry&) const = default;
};

struct ImageManifest {
  std::string id;
  std::string story_id;
  text::Variant variant = text::Variant::sentence;
  std::int64_t seed = 0;
  bool coref_degraded = false;
  std::vector<ManifestEntry> entries;

  bool operator==(const ImageManifest&) const = default;
};

// Same (story, variant, seed) always maps to the same manifest id.
inline std::string manifest_id(const std::string& story_id, text::Variant variant, std::int64_t seed) {
  return "manifest-" +
         sha256_hex(story_id + "\x1f" + text::to_string(variant) + "\x1f" + std::to_string(seed))
             .substr(0, 16);
}

inline void to_json(json& j, const ImageCandidate& c) {
  j = {{"prompt_index", c.prompt_index},
       {"candidate_index", c.candidate_index},
       {"image_ref", c.image_ref},
       {"similarity", c.similarity}};
}

inline void from_json(const json& j, ImageCandidate& c) {
  j.at("prompt_index").get_to(c.prompt_index);
  j.at("candidate_index").get_to(c.candidate_index);
  j.at("image_ref").get_to(c.image_ref);
  j.at("similarity").get_to(c.similarity);
}

inline void to_json(json& j, const ManifestEntry& e) {
  j = {{"sentence_index", e.sentence_index},
       {"prompt", e.prompt},
       {"selection_text", e.selection_text},
       {"candidates", e.candidates},
       {"selected_index", e.selected_index},
       {"stylized_ref", e.stylized_ref},
       {"style_degraded", e.style_degraded}};
  if (e.keywords) j["keywords"] = *e.keywords;
}

inline void from_json(const json& j, ManifestEntry& e) {
  j.at("sentence_index").get_to(e.sentence_index);
  j.at("prompt").get_to(e.prompt);
  e.selection_text = j.value("selection_text", e.prompt);
  j.at("candidates").get_to(e.candidates);
  j.at("selected_index").get_to(e.selected_index);
  j.at("stylized_ref").get_to(e.stylized_ref);
  e.style_degraded = j.value("style_degraded", false);
  if (j.contains("keywords")) e.keywords = j["keywords"].get<std::vector<std::string>>();
}

inline void to_json(json& j, const ImageManifest& m) {
  j = {{"id", m.id},
       {"story_id", m.story_id},
       {"variant", text::to_string(m.variant)},
       {"seed", m.seed},
       {"coref_degraded", m.coref_degraded},
       {"entries", m.entries}};
}

inline void from_json(const json& j, ImageManifest& m) {
  j.at("id").get_to(m.id);
  j.at("story_id").get_to(m.story_id);
  m.variant = text::variant_from_string(j.at("variant").get<std::string>());
  j.at("seed").get_to(m.seed);
  m.coref_degraded = j.value("coref_degraded", false);
  j.at("entries").get_to(m.entries);
}

}  // namespace retell::image
