#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "retell/backends/interfaces.hpp"
#include "retell/core/error.hpp"
#include "retell/core/text.hpp"
#include "retell/core/vector_math.hpp"
#include "retell/materials/story.hpp"
#include "retell/text/inflection.hpp"
#include "retell/text/segment.hpp"
#include "retell/text/sentence.hpp"

namespace retell::feedback {

using nlohmann::json;

struct RetellTranscript {
  int round_index = 0;
  std::string text;
  bool edited = false;
  double started_at = 0.0;  // seconds
  double ended_at = 0.0;

  bool operator==(const RetellTranscript&) const = default;
};

struct FeedbackConfig {
  double threshold = 0.7;

  void validate() const { require(threshold > 0.0 && threshold < 1.0, "threshold must be in (0, 1)"); }
};

struct UsageScore {
  materials::TargetWord word;
  bool detected = false;
  double similarity = 0.0;  // in [0, 1]
  bool correct = false;
  std::optional<std::string> matched_sentence;
  std::string story_sentence;
  int story_sentence_index = 0;

  bool operator==(const UsageScore&) const = default;
};

struct RetellReport {
  std::vector<UsageScore> words;
  double overall_similarity = 0.0;

  bool operator==(const RetellReport&) const = default;
};

// One flag per target word: spoken as a whole token or a regular inflection.
inline std::vector<bool> detect_spoken_words(const std::string& transcript,
                                             const std::vector<materials::TargetWord>& words) {
  const auto tokens = text::token_set(transcript);
  std::vector<bool> flags;
  flags.reserve(words.size());
  for (const auto& w : words) flags.push_back(text::contains_word(tokens, w.surface));
  return flags;
}

inline bool classify_correctness(double similarity, const FeedbackConfig& cfg) {
  require(similarity >= 0.0 && similarity <= 1.0, "similarity must be in [0, 1]");
  cfg.validate();
  return similarity >= cfg.threshold;
}

inline std::vector<std::string> transcript_sentences(const std::string& transcript) {
  if (text::is_blank(transcript)) return {};
  std::vector<std::string> out;
  for (auto& u : text::segment_sentences(transcript)) out.push_back(std::move(u.raw));
  return out;
}

// Reference sentence: the first story sentence containing the word.
inline const text::SentenceUnit& reference_sentence(const std::vector<text::SentenceUnit>& units,
                                                    const materials::TargetWord& word) {
  for (const auto& u : units) {
    if (text::contains_word(u.raw, word.surface)) return u;
  }
  fail(ErrorCode::material_inconsistency, "target word not found in story sentences: " + word.surface);
}

// Max over transcript sentences that contain the word of the clamped
// cosine between that sentence and the story sentence containing the word;
// 0 when the word is never spoken.
inline UsageScore score_word_usage(const materials::Story& story,
                                   const std::vector<text::SentenceUnit>& units,
                                   const std::string& transcript, const materials::TargetWord& word,
                                   const FeedbackConfig& cfg, backends::SentenceEmbedder& embedder) {
  cfg.validate();
  bool in_set = false;
  for (const auto& w : story.word_set.words) in_set = in_set || w.surface == text::to_lower(word.surface);
  require(in_set, "word is not in the story's word set: " + word.surface);

  const auto& ref = reference_sentence(units, word);
  UsageScore score;
  score.word = word;
  score.story_sentence = ref.raw;
  score.story_sentence_index = ref.index;

  std::vector<std::string> spoken;
  for (auto& s : transcript_sentences(transcript)) {
    if (text::contains_word(s, word.surface)) spoken.push_back(std::move(s));
  }
  score.detected = !spoken.empty();
  if (!score.detected) return score;

  std::vector<std::string> batch{ref.raw};
  batch.insert(batch.end(), spoken.begin(), spoken.end());
  const auto vecs = embedder.embed(batch);
  if (vecs.size() != batch.size()) throw BackendError("sentence-embedder", "wrong batch size", false);

  for (std::size_t i = 0; i < spoken.size(); ++i) {
    double sim = clamp01(cosine(vecs[0], vecs[i + 1]));
    if (!score.matched_sentence || sim > score.similarity) {
      score.similarity = sim;
      score.matched_sentence = spoken[i];
    }
  }
  score.correct = classify_correctness(score.similarity, cfg);
  return score;
}

inline RetellReport score_retelling(const materials::Story& story,
                                    const std::vector<text::SentenceUnit>& units,
                                    const std::string& transcript, const FeedbackConfig& cfg,
                                    backends::SentenceEmbedder& embedder) {
  RetellReport report;
  for (const auto& w : story.word_set.words) {
    report.words.push_back(score_word_usage(story, units, transcript, w, cfg, embedder));
  }
  if (!text::is_blank(transcript)) {
    const auto vecs = embedder.embed({transcript, story.text});
    if (vecs.size() != 2) throw BackendError("sentence-embedder", "wrong batch size", false);
    report.overall_similarity = clamp01(cosine(vecs[0], vecs[1]));
  }
  return report;
}

// JSON

inline void to_json(json& j, const RetellTranscript& t) {
  j = {{"round_index", t.round_index},
       {"text", t.text},
       {"edited", t.edited},
       {"started_at", t.started_at},
       {"ended_at", t.ended_at}};
}

inline void to_json(json& j, const UsageScore& s) {
  j = {{"surface", s.word.surface},
       {"detected", s.detected},
       {"similarity", s.similarity},
       {"correct", s.correct},
       {"matched_sentence", s.matched_sentence ? json(*s.matched_sentence) : json(nullptr)},
       {"story_sentence", s.story_sentence},
       {"story_sentence_index", s.story_sentence_index}};
}

inline void to_json(json& j, const RetellReport& r) {
  j = {{"overall_similarity", r.overall_similarity}, {"words", r.words}};
}

}  // namespace retell::feedback
