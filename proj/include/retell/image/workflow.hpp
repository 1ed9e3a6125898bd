#pragma once

#include <cstdint>
#include <future>
#include <span>
#include <string>
#include <vector>

#include "retell/backends/interfaces.hpp"
#include "retell/backends/retry.hpp"
#include "retell/core/error.hpp"
#include "retell/core/vector_math.hpp"
#include "retell/image/blob_store.hpp"
#include "retell/image/manifest.hpp"
#include "retell/image/png.hpp"
#include "retell/materials/story.hpp"
#include "retell/text/preprocess.hpp"
#include "retell/text/prompts.hpp"

namespace retell::image {

struct WorkflowOptions {
  int candidates_per_sentence = 5;
  int candidates_whole_story = 10;
  int keywords_per_sentence = 3;
  backends::RetryPolicy retry{};
  bool parallel = false;  // generate candidates for all prompts concurrently
};

// Index of the largest value; ties go to the lowest index.
inline std::size_t argmax_lowest(std::span<const double> values) {
  require(!values.empty(), "argmax of empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

inline std::vector<ImageCandidate> generate_candidates(const text::PromptSpec& prompt, int prompt_index,
                                                       int n, std::int64_t seed,
                                                       backends::TextToImage& t2i, BlobStore& blobs,
                                                       const backends::RetryPolicy& retry = {}) {
  require(n > 0, "generate_candidates: n must be positive");
  std::vector<Bytes> images;
  try {
    images = backends::with_retry(retry, [&] { return t2i.generate(prompt.prompt, n, seed); });
  } catch (const BackendError& e) {
    throw BackendError(e.backend(), "prompt_index " + std::to_string(prompt_index) + ": " + e.what(),
                       false);
  }
  if (images.size() != static_cast<std::size_t>(n)) {
    throw BackendError("text-to-image",
                       "prompt_index " + std::to_string(prompt_index) + ": expected " +
                           std::to_string(n) + " images, got " + std::to_string(images.size()),
                       false);
  }
  std::vector<ImageCandidate> out;
  for (int i = 0; i < n; ++i) {
    if (!is_decodable_png(images[i])) {
      throw BackendError("text-to-image",
                         "prompt_index " + std::to_string(prompt_index) + ": undecodable image", false);
    }
    out.push_back({prompt_index, i, blobs.put(images[i]), 0.0});
  }
  return out;
}

// Fills each candidate's similarity with cosine(text, image) and returns
// the arg-max index. Embedder failures propagate: selection never degrades.
inline std::size_t select_best(const std::string& sentence_text, std::span<ImageCandidate> candidates,
                               backends::CrossModalEmbedder& embedder, const BlobStore& blobs,
                               const backends::RetryPolicy& retry = {}) {
  require(!candidates.empty(), "select_best: no candidates");
  const auto text_vec = backends::with_retry(retry, [&] { return embedder.embed_text(sentence_text); });
  std::vector<double> scores;
  for (auto& c : candidates) {
    auto bytes = blobs.at(c.image_ref);
    auto image_vec = backends::with_retry(retry, [&] { return embedder.embed_image(bytes); });
    c.similarity = cosine(text_vec, image_vec);
    scores.push_back(c.similarity);
  }
  return argmax_lowest(scores);
}

struct StylizeResult {
  std::string ref;
  bool degraded = false;
};

// Falls back to the unstyled image when the styler fails or returns an
// image of different dimensions.
inline StylizeResult stylize(const std::string& image_ref, backends::Styler& styler, BlobStore& blobs,
                             const backends::RetryPolicy& retry = {}) {
  const auto input = blobs.at(image_ref);
  const auto before = decode_png(input);
  try {
    auto output = backends::with_retry(retry, [&] { return styler.stylize(input); });
    auto after = decode_png(output);
    if (after.width != before.width || after.height != before.height) {
      return {image_ref, true};
    }
    return {blobs.put(output), false};
  } catch (const std::exception&) {
    return {image_ref, true};
  }
}

inline int candidate_count(text::Variant variant, const WorkflowOptions& opts) {
  return variant == text::Variant::whole_story ? opts.candidates_whole_story
                                               : opts.candidates_per_sentence;
}

// Preprocess -> prompts -> candidates -> cross-modal selection -> style.
// The manifest is returned only when every step succeeded.
inline ImageManifest run_workflow(const materials::Story& story, text::Variant variant, std::int64_t seed,
                                  const backends::Backends& be, BlobStore& blobs,
                                  const WorkflowOptions& opts = {}) {
  require(be.coref && be.t2i && be.cross_modal && be.styler, "run_workflow: backend missing");
  require(materials::validate_story(story).missing.empty(),
          "run_workflow: story is missing target words");

  const auto pre = text::preprocess(story.text, *be.coref);
  const auto prompts = text::build_prompts(pre.sentences, variant, story.text, opts.keywords_per_sentence);
  const int n = candidate_count(variant, opts);

  std::vector<std::vector<ImageCandidate>> candidates(prompts.size());
  if (opts.parallel && prompts.size() > 1) {
    std::vector<std::future<std::vector<ImageCandidate>>> jobs;
    for (std::size_t p = 0; p < prompts.size(); ++p) {
      jobs.push_back(std::async(std::launch::async, [&, p] {
        return generate_candidates(prompts[p], static_cast<int>(p), n, seed, *be.t2i, blobs, opts.retry);
      }));
    }
    for (std::size_t p = 0; p < prompts.size(); ++p) candidates[p] = jobs[p].get();
  } else {
    for (std::size_t p = 0; p < prompts.size(); ++p) {
      candidates[p] = generate_candidates(prompts[p], static_cast<int>(p), n, seed, *be.t2i, blobs, opts.retry);
    }
  }

  ImageManifest manifest;
  manifest.id = manifest_id(story.id, variant, seed);
  manifest.story_id = story.id;
  manifest.variant = variant;
  manifest.seed = seed;
  manifest.coref_degraded = pre.degraded;
  for (std::size_t p = 0; p < prompts.size(); ++p) {
    ManifestEntry entry;
    entry.sentence_index = prompts[p].sentence_index;
    entry.prompt = prompts[p].prompt;
    entry.keywords = prompts[p].keywords;
    entry.selection_text = variant == text::Variant::whole_story
                               ? story.text
                               : pre.sentences[static_cast<std::size_t>(prompts[p].sentence_index)].resolved;
    entry.candidates = std::move(candidates[p]);
    entry.selected_index = static_cast<int>(
        select_best(entry.selection_text, entry.candidates, *be.cross_modal, blobs, opts.retry));
    auto styled = stylize(entry.candidates[entry.selected_index].image_ref, *be.styler, blobs, opts.retry);
    entry.stylized_ref = styled.ref;
    entry.style_degraded = styled.degraded;
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

}  // namespace retell::image
