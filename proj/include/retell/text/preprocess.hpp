#pragma once

#include <string_view>

#include "retell/backends/interfaces.hpp"
#include "retell/text/coref.hpp"
#include "retell/text/segment.hpp"

namespace retell::text {

// Sentence split followed by pronoun substitution.
inline Preprocessed preprocess(std::string_view story_text, backends::CorefResolver& resolver) {
  return resolve_coreferences(segment_sentences(story_text), story_text, resolver);
}

}  // namespace retell::text
