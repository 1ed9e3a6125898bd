#pragma once

#include <string>
#include <vector>

#include "retell/backends/interfaces.hpp"
#include "retell/core/error.hpp"
#include "retell/core/text.hpp"
#include "retell/materials/story.hpp"

namespace retell::materials {

// generate a short story that has no more than 60 words and must contain
// the words 'a', 'b', ..., and 'z'
inline std::string story_prompt(const WordSet& ws, int max_words = 60) {
  std::vector<std::string> quoted;
  for (const auto& w : ws.words) quoted.push_back("'" + w.surface + "'");
  std::string list;
  if (quoted.size() == 1) {
    list = quoted[0];
  } else if (quoted.size() == 2) {
    list = quoted[0] + " and " + quoted[1];
  } else {
    for (std::size_t i = 0; i + 1 < quoted.size(); ++i) list += quoted[i] + ", ";
    list += "and " + quoted.back();
  }
  return "generate a short story that has no more than " + std::to_string(max_words) +
         " words and must contain the words " + list;
}

struct GenerateOptions {
  int max_words = 60;
  int retries = 3;  // extra attempts when the reply misses target words
};

// Backend errors propagate unchanged (BackendError is retryable); a reply
// that keeps missing words after all retries raises generation_failed.
inline Story generate_story(const WordSet& ws, backends::TextGenerator& llm,
                            const GenerateOptions& opts = {}) {
  validate_word_set(ws);
  require(opts.retries >= 0, "retries must be non-negative");
  require(opts.max_words > 0, "max_words must be positive");
  const auto prompt = story_prompt(ws, opts.max_words);

  std::vector<std::string> missing;
  for (int attempt = 0; attempt <= opts.retries; ++attempt) {
    Story story;
    story.text = std::string(text::trim(llm.generate(prompt)));
    story.word_set = ws;
    story.max_words = opts.max_words;
    story.provenance = Provenance::generated;
    auto report = validate_story(story);
    if (report.missing.empty() && !story.text.empty()) {
      story.id = derive_story_id(story.text, ws);
      return story;
    }
    missing = report.missing;
  }
  fail(ErrorCode::generation_failed,
       "story generation failed after " + std::to_string(opts.retries + 1) +
           " attempts; missing words: " + text::join(missing, ", "));
}

}  // namespace retell::materials
