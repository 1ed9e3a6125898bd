#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "retell/core/digest.hpp"
#include "retell/text/sentence.hpp"

// Plug-in contracts for the ML backends. Every adapter (stub, local
// command, remote endpoint) must be safe to call from several threads.
namespace retell::backends {

using Embedding = std::vector<float>;

class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual std::string generate(const std::string& prompt) = 0;
};

// A coreference cluster over character offsets of the resolved text.
// `main` is the representative mention whose text replaces the others.
struct CorefCluster {
  text::Span main;
  std::vector<text::Span> mentions;
};

class CorefResolver {
 public:
  virtual ~CorefResolver() = default;
  virtual std::vector<CorefCluster> resolve(const std::string& text) = 0;
};

class TextToImage {
 public:
  virtual ~TextToImage() = default;
  // Exactly `n` PNG images. Seeded backends must be deterministic in
  // (prompt, n, seed).
  virtual std::vector<Bytes> generate(const std::string& prompt, int n, std::int64_t seed) = 0;
};

class CrossModalEmbedder {
 public:
  virtual ~CrossModalEmbedder() = default;
  virtual Embedding embed_text(const std::string& text) = 0;
  virtual Embedding embed_image(const Bytes& png) = 0;
};

class SentenceEmbedder {
 public:
  virtual ~SentenceEmbedder() = default;
  virtual std::vector<Embedding> embed(const std::vector<std::string>& sentences) = 0;

  Embedding embed_one(const std::string& sentence) { return embed({sentence}).at(0); }
};

class Styler {
 public:
  virtual ~Styler() = default;
  // Output must keep the input's pixel dimensions.
  virtual Bytes stylize(const Bytes& png) = 0;
};

struct Backends {
  std::shared_ptr<TextGenerator> text_generator;
  std::shared_ptr<CorefResolver> coref;
  std::shared_ptr<TextToImage> t2i;
  std::shared_ptr<CrossModalEmbedder> cross_modal;
  std::shared_ptr<SentenceEmbedder> sentence_embedder;
  std::shared_ptr<Styler> styler;
};

}  // namespace retell::backends
