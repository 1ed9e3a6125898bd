#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "retell/backends/interfaces.hpp"
#include "retell/core/digest.hpp"
#include "retell/core/error.hpp"
#include "retell/core/text.hpp"
#include "retell/image/png.hpp"

// Deterministic in-repo backends. They let the whole pipeline run without
// model weights; none of them claims semantic quality.
namespace retell::backends {

namespace detail {

// Uniform [0, 1) from a 64-bit engine draw; identical on every platform.
inline float unit_float(std::uint64_t x) {
  return static_cast<float>(static_cast<double>(x >> 11) * 0x1.0p-53);
}

}  // namespace detail

// Returns the same text on every call.
class FixedTextGenerator : public TextGenerator {
 public:
  explicit FixedTextGenerator(std::string text) : text_(std::move(text)) {}

  std::string generate(const std::string& prompt) override {
    std::lock_guard lock(mu_);
    prompts_.push_back(prompt);
    return text_;
  }

  std::vector<std::string> prompts() const {
    std::lock_guard lock(mu_);
    return prompts_;
  }

 private:
  std::string text_;
  mutable std::mutex mu_;
  std::vector<std::string> prompts_;
};

// Returns the scripted replies in order, repeating the last one.
class SequenceTextGenerator : public TextGenerator {
 public:
  explicit SequenceTextGenerator(std::vector<std::string> replies) : replies_(std::move(replies)) {
    require(!replies_.empty(), "SequenceTextGenerator: no replies");
  }

  std::string generate(const std::string&) override {
    auto i = calls_.fetch_add(1);
    return replies_[std::min<std::size_t>(i, replies_.size() - 1)];
  }

  std::size_t calls() const { return calls_.load(); }

 private:
  std::vector<std::string> replies_;
  std::atomic<std::size_t> calls_{0};
};

// Builds a plain story around the quoted words found in the prompt.
class TemplateTextGenerator : public TextGenerator {
 public:
  std::string generate(const std::string& prompt) override {
    std::vector<std::string> words;
    auto marker = prompt.find("contain the words");
    std::size_t pos = marker == std::string::npos ? 0 : marker;
    while (true) {
      auto open = prompt.find('\'', pos);
      if (open == std::string::npos) break;
      auto close = prompt.find('\'', open + 1);
      if (close == std::string::npos) break;
      words.push_back(prompt.substr(open + 1, close - open - 1));
      pos = close + 1;
    }
    if (words.empty()) return "A quiet day passed in a small town.";
    std::string story = "A young girl kept a notebook of new words.";
    for (std::size_t i = 0; i < words.size(); i += 2) {
      story += " One day she wrote \"" + words[i] + "\"";
      if (i + 1 < words.size()) story += " and \"" + words[i + 1] + "\"";
      story += " in it.";
    }
    return story;
  }
};

// Solid-color images whose color is keyed by (prompt, seed, candidate).
class SolidColorTextToImage : public TextToImage {
 public:
  explicit SolidColorTextToImage(std::uint32_t width = 64, std::uint32_t height = 64)
      : width_(width), height_(height) {}

  std::vector<Bytes> generate(const std::string& prompt, int n, std::int64_t seed) override {
    require(n > 0, "text-to-image: n must be positive");
    std::vector<Bytes> out;
    std::vector<std::uint32_t> used;
    for (int i = 0; i < n; ++i) {
      std::uint32_t color = 0;
      for (int salt = 0;; ++salt) {
        auto h = hash64(prompt + "\x1f" + std::to_string(seed) + "\x1f" + std::to_string(i) +
                        "\x1f" + std::to_string(salt));
        color = static_cast<std::uint32_t>(h & 0xFFFFFF);
        if (std::find(used.begin(), used.end(), color) == used.end()) break;
      }
      used.push_back(color);
      out.push_back(image::encode_png(image::solid(width_, height_,
                                                   static_cast<std::uint8_t>(color >> 16),
                                                   static_cast<std::uint8_t>(color >> 8),
                                                   static_cast<std::uint8_t>(color))));
    }
    return out;
  }

 private:
  std::uint32_t width_;
  std::uint32_t height_;
};

// Non-negative hashed bag-of-words for text and a byte-hash-seeded vector
// for images; cosines therefore fall in [0, 1].
class HashingCrossModalEmbedder : public CrossModalEmbedder {
 public:
  explicit HashingCrossModalEmbedder(std::size_t dim = 64) : dim_(dim) {}

  Embedding embed_text(const std::string& s) override {
    Embedding v(dim_, 0.0f);
    for (const auto& t : text::tokenize(s)) v[hash64(t.lower) % dim_] += 1.0f;
    return v;
  }

  Embedding embed_image(const Bytes& png) override {
    auto digest = sha256(png);
    std::seed_seq seq(digest.begin(), digest.end());
    std::mt19937_64 engine(seq);
    Embedding v(dim_);
    for (auto& x : v) x = detail::unit_float(engine());
    return v;
  }

 private:
  std::size_t dim_;
};

// Non-negative hashed token counts. Identical sentences embed identically.
class HashingSentenceEmbedder : public SentenceEmbedder {
 public:
  explicit HashingSentenceEmbedder(std::size_t dim = 256) : dim_(dim) {}

  std::vector<Embedding> embed(const std::vector<std::string>& sentences) override {
    std::vector<Embedding> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) {
      Embedding v(dim_, 0.0f);
      for (const auto& t : text::tokenize(s)) v[hash64(t.lower) % dim_] += 1.0f;
      out.push_back(std::move(v));
    }
    return out;
  }

 private:
  std::size_t dim_;
};

// Fixed vectors for known sentences; anything else goes to the fallback.
class PresetSentenceEmbedder : public SentenceEmbedder {
 public:
  PresetSentenceEmbedder(std::map<std::string, Embedding> table,
                         std::shared_ptr<SentenceEmbedder> fallback = nullptr)
      : table_(std::move(table)), fallback_(std::move(fallback)) {}

  std::vector<Embedding> embed(const std::vector<std::string>& sentences) override {
    std::vector<Embedding> out;
    for (const auto& s : sentences) {
      auto it = table_.find(std::string(text::trim(s)));
      if (it != table_.end()) {
        out.push_back(it->second);
      } else if (fallback_) {
        out.push_back(fallback_->embed_one(s));
      } else {
        throw BackendError("preset-embedder", "no vector for \"" + s + "\"", false);
      }
    }
    return out;
  }

 private:
  std::map<std::string, Embedding> table_;
  std::shared_ptr<SentenceEmbedder> fallback_;
};

class IdentityStyler : public Styler {
 public:
  Bytes stylize(const Bytes& png) override { return png; }
};

// Color quantization: a cheap stand-in for cartoonization that actually
// rewrites pixels while keeping dimensions.
class PosterizeStyler : public Styler {
 public:
  explicit PosterizeStyler(int levels = 4) : levels_(levels) {
    require(levels >= 2 && levels <= 256, "PosterizeStyler: levels in [2, 256]");
  }

  Bytes stylize(const Bytes& png) override {
    auto raster = image::decode_png(png);
    const int step = 256 / levels_;
    for (auto& c : raster.rgb) {
      int q = (c / step) * step + step / 2;
      c = static_cast<std::uint8_t>(std::min(q, 255));
    }
    return image::encode_png(raster);
  }

 private:
  int levels_;
};

}  // namespace retell::backends
