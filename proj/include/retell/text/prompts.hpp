#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "retell/core/error.hpp"
#include "retell/text/sentence.hpp"
#include "retell/text/textrank.hpp"

namespace retell::text {

// sentence: one resolved sentence per image; keyword: TextRank keywords of
// each resolved sentence; whole_story: the full story as a single prompt.
enum class Variant { sentence, keyword, whole_story };

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::sentence: return "sentence";
    case Variant::keyword: return "keyword";
    case Variant::whole_story: return "whole_story";
  }
  return "sentence";
}

inline Variant variant_from_string(std::string_view s) {
  if (s == "sentence") return Variant::sentence;
  if (s == "keyword") return Variant::keyword;
  if (s == "whole_story") return Variant::whole_story;
  fail(ErrorCode::invalid_argument, "unknown variant: " + std::string(s));
}

inline constexpr int kWholeStoryIndex = -1;

struct PromptSpec {
  int sentence_index = 0;
  Variant mode = Variant::sentence;
  std::string prompt;
  std::optional<std::vector<std::string>> keywords;

  bool operator==(const PromptSpec&) const = default;
};

inline std::vector<PromptSpec> build_prompts(const std::vector<SentenceUnit>& units, Variant variant,
                                             std::string_view story_text, int keywords_per_sentence = 3) {
  std::vector<PromptSpec> out;
  switch (variant) {
    case Variant::whole_story:
      out.push_back({kWholeStoryIndex, variant, std::string(story_text), std::nullopt});
      break;
    case Variant::sentence:
      for (const auto& u : units) out.push_back({u.index, variant, u.resolved, std::nullopt});
      break;
    case Variant::keyword:
      for (const auto& u : units) {
        auto kws = extract_keywords(u.resolved, keywords_per_sentence);
        out.push_back({u.index, variant, join(kws, ", "), kws});
      }
      break;
  }
  return out;
}

inline void to_json(nlohmann::json& j, const PromptSpec& p) {
  j = {{"sentence_index", p.sentence_index}, {"mode", to_string(p.mode)}, {"prompt", p.prompt}};
  if (p.keywords) j["keywords"] = *p.keywords;
}

}  // namespace retell::text
