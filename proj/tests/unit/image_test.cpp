#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "retell/image/blob_store.hpp"
#include "retell/image/manifest.hpp"
#include "retell/image/workflow.hpp"

using namespace retell;
using namespace retell::image;

namespace {

class BrokenStyler : public backends::Styler {
 public:
  Bytes stylize(const Bytes&) override { throw BackendError("styler", "model crashed", false); }
};

class ResizingStyler : public backends::Styler {
 public:
  Bytes stylize(const Bytes&) override { return encode_png(solid(3, 3, 1, 2, 3)); }
};

class ShortT2I : public backends::TextToImage {
 public:
  std::vector<Bytes> generate(const std::string&, int n, std::int64_t) override {
    return std::vector<Bytes>(static_cast<std::size_t>(n - 1), encode_png(solid(2, 2, 0, 0, 0)));
  }
};

class GarbageT2I : public backends::TextToImage {
 public:
  std::vector<Bytes> generate(const std::string&, int n, std::int64_t) override {
    return std::vector<Bytes>(static_cast<std::size_t>(n), Bytes{1, 2, 3});
  }
};

// Fails a fixed number of times with a retryable error, then delegates.
class FlakyT2I : public backends::TextToImage {
 public:
  explicit FlakyT2I(int failures) : failures_(failures) {}
  std::vector<Bytes> generate(const std::string& p, int n, std::int64_t seed) override {
    ++calls;
    if (failures_-- > 0) throw BackendError("t2i", "busy", true);
    return inner_.generate(p, n, seed);
  }
  int calls = 0;

 private:
  int failures_;
  backends::SolidColorTextToImage inner_{4, 4};
};

// Text vector [1, 0]; image vector [cos a, sin a] with `a` taken from a table
// keyed by the image's red channel.
class TableEmbedder : public backends::CrossModalEmbedder {
 public:
  explicit TableEmbedder(std::vector<double> sims) : sims_(std::move(sims)) {}
  backends::Embedding embed_text(const std::string&) override { return {1.0f, 0.0f}; }
  backends::Embedding embed_image(const Bytes& png) override {
    auto r = decode_png(png).rgb[0];
    double s = sims_.at(r);
    return {static_cast<float>(s), static_cast<float>(std::sqrt(std::max(0.0, 1 - s * s)))};
  }

 private:
  std::vector<double> sims_;
};

backends::RetryPolicy fast_retry() { return {2, std::chrono::milliseconds(1)}; }

}  // namespace

TEST(Png, RoundTrip) {
  Raster r{3, 2, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18}};
  auto bytes = encode_png(r);
  EXPECT_TRUE(is_decodable_png(bytes));
  EXPECT_EQ(decode_png(bytes), r);
  EXPECT_FALSE(is_decodable_png(Bytes{0, 1, 2}));
  EXPECT_THROW(encode_png(Raster{}), Error);
}

TEST(BlobStore, ContentAddressed) {
  MemoryBlobStore mem;
  auto dir = fixtures::temp_dir("blobs");
  FileBlobStore file(dir);
  auto png = encode_png(solid(2, 2, 9, 9, 9));
  for (BlobStore* store : std::initializer_list<BlobStore*>{&mem, &file}) {
    auto ref = store->put(png);
    EXPECT_EQ(ref, sha256_hex(png));
    EXPECT_TRUE(BlobStore::valid_ref(ref));
    EXPECT_EQ(store->put(png), ref);
    EXPECT_EQ(store->at(ref), png);
    EXPECT_FALSE(store->get(std::string(64, '0')).has_value());
    EXPECT_THROW(store->at("nope"), Error);
  }
  EXPECT_EQ(mem.size(), 1u);
  EXPECT_EQ(FileBlobStore(dir).at(sha256_hex(png)), png);
  EXPECT_FALSE(BlobStore::valid_ref("../etc/passwd"));
  EXPECT_FALSE(BlobStore::valid_ref(std::string(64, 'A')));
  std::filesystem::remove_all(dir);
}

TEST(Selection, ArgmaxMatchesOracle) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 1 + rng() % 12;
    std::vector<double> v(n);
    // a coarse grid forces plenty of ties
    for (auto& x : v) x = static_cast<double>(static_cast<int>(rng() % 9) - 4) / 4.0;
    EXPECT_EQ(argmax_lowest(v), oracle::argmax(v));
  }
  EXPECT_THROW(argmax_lowest(std::vector<double>{}), Error);
}

TEST(Selection, SelectBestUsesCosine) {
  MemoryBlobStore blobs;
  std::vector<ImageCandidate> cands;
  for (std::uint8_t i = 0; i < 4; ++i) cands.push_back({0, i, blobs.put(encode_png(solid(2, 2, i, 0, 0))), 0});
  TableEmbedder embedder({0.1, 0.9, 0.9, 0.3});
  EXPECT_EQ(select_best("text", cands, embedder, blobs), 1u);
  EXPECT_NEAR(cands[1].similarity, 0.9, 1e-6);
  EXPECT_NEAR(cands[3].similarity, 0.3, 1e-6);
}

TEST(Candidates, CountRefsAndDecodability) {
  MemoryBlobStore blobs;
  backends::SolidColorTextToImage t2i(8, 8);
  text::PromptSpec spec{0, text::Variant::sentence, "An old man sat by the sea.", std::nullopt};
  auto c = generate_candidates(spec, 2, 5, 7, t2i, blobs);
  ASSERT_EQ(c.size(), 5u);
  std::set<std::string> refs;
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(c[i].prompt_index, 2);
    EXPECT_EQ(c[i].candidate_index, i);
    EXPECT_TRUE(is_decodable_png(blobs.at(c[i].image_ref)));
    refs.insert(c[i].image_ref);
  }
  EXPECT_EQ(refs.size(), 5u);
  auto again = generate_candidates(spec, 2, 5, 7, t2i, blobs);
  EXPECT_EQ(again, c);
}

TEST(Candidates, BackendFaultsCarryPromptIndex) {
  MemoryBlobStore blobs;
  text::PromptSpec spec{3, text::Variant::sentence, "x", std::nullopt};
  ShortT2I short_t2i;
  GarbageT2I garbage;
  for (backends::TextToImage* t2i : std::initializer_list<backends::TextToImage*>{&short_t2i, &garbage}) {
    try {
      generate_candidates(spec, 3, 5, 7, *t2i, blobs, fast_retry());
      FAIL();
    } catch (const BackendError& e) {
      EXPECT_NE(std::string(e.what()).find("prompt_index 3"), std::string::npos) << e.what();
    }
  }
}

TEST(Candidates, RetryableErrorsAreRetried) {
  MemoryBlobStore blobs;
  text::PromptSpec spec{0, text::Variant::sentence, "x", std::nullopt};
  FlakyT2I ok_after_two(2);
  EXPECT_EQ(generate_candidates(spec, 0, 5, 7, ok_after_two, blobs, fast_retry()).size(), 5u);
  EXPECT_EQ(ok_after_two.calls, 3);
  FlakyT2I never(3);
  EXPECT_THROW(generate_candidates(spec, 0, 5, 7, never, blobs, fast_retry()), BackendError);
  EXPECT_EQ(never.calls, 3);
}

TEST(Stylize, KeepsDimensionsOrFallsBack) {
  MemoryBlobStore blobs;
  auto ref = blobs.put(encode_png(solid(6, 4, 200, 100, 50)));
  backends::PosterizeStyler posterize;
  auto styled = stylize(ref, posterize, blobs);
  EXPECT_FALSE(styled.degraded);
  EXPECT_NE(styled.ref, ref);
  auto out = decode_png(blobs.at(styled.ref));
  EXPECT_EQ(out.width, 6u);
  EXPECT_EQ(out.height, 4u);

  BrokenStyler broken;
  EXPECT_EQ(stylize(ref, broken, blobs).ref, ref);
  EXPECT_TRUE(stylize(ref, broken, blobs).degraded);
  ResizingStyler resizing;
  EXPECT_TRUE(stylize(ref, resizing, blobs).degraded);
}

TEST(Workflow, CardinalityPerVariant) {
  auto be = fixtures::stub_backends();
  auto story = fixtures::corpus()[0];
  for (auto v : {text::Variant::sentence, text::Variant::keyword, text::Variant::whole_story}) {
    MemoryBlobStore blobs;
    auto m = run_workflow(story, v, 7, be, blobs);
    const std::size_t prompts = v == text::Variant::whole_story ? 1 : 5;
    const std::size_t per = v == text::Variant::whole_story ? 10 : 5;
    ASSERT_EQ(m.entries.size(), prompts);
    for (std::size_t p = 0; p < prompts; ++p) {
      const auto& e = m.entries[p];
      EXPECT_EQ(e.candidates.size(), per);
      EXPECT_EQ(e.sentence_index, v == text::Variant::whole_story ? -1 : static_cast<int>(p));
      EXPECT_TRUE(is_decodable_png(blobs.at(e.stylized_ref)));
      EXPECT_FALSE(e.style_degraded);
      std::vector<double> sims;
      for (const auto& c : e.candidates) sims.push_back(c.similarity);
      EXPECT_EQ(static_cast<std::size_t>(e.selected_index), oracle::argmax(sims));
      EXPECT_EQ(e.keywords.has_value(), v == text::Variant::keyword);
    }
    EXPECT_EQ(m.id, manifest_id(story.id, v, 7));
  }
}

TEST(Workflow, DeterministicAndParallelAgrees) {
  auto be = fixtures::stub_backends();
  auto story = fixtures::corpus()[4];
  MemoryBlobStore a, b, c;
  auto m1 = run_workflow(story, text::Variant::sentence, 7, be, a);
  auto m2 = run_workflow(story, text::Variant::sentence, 7, be, b);
  WorkflowOptions par;
  par.parallel = true;
  auto m3 = run_workflow(story, text::Variant::sentence, 7, be, c, par);
  EXPECT_EQ(json(m1).dump(), json(m2).dump());
  EXPECT_EQ(json(m1).dump(), json(m3).dump());
  auto other = run_workflow(story, text::Variant::sentence, 8, be, a);
  EXPECT_NE(json(m1).dump(), json(other).dump());
}

TEST(Workflow, SelectionTextIsResolvedSentence) {
  auto be = fixtures::stub_backends();
  auto fx = fixtures::read_json(fixtures::data_dir() / "coref_old_man.json");
  auto story = fixtures::story(fx["text"].get<std::string>(), {"harbor"});
  story.text += " The harbor was quiet.";
  MemoryBlobStore blobs;
  auto m = run_workflow(story, text::Variant::sentence, 7, be, blobs);
  auto resolved = fx["resolved"].get<std::vector<std::string>>();
  for (std::size_t i = 0; i < resolved.size(); ++i) EXPECT_EQ(m.entries[i].selection_text, resolved[i]);
}

TEST(Workflow, StoryMissingWordsIsRejected) {
  auto be = fixtures::stub_backends();
  MemoryBlobStore blobs;
  EXPECT_THROW(run_workflow(fixtures::story("The sea.", {"harbor"}), text::Variant::sentence, 7, be, blobs), Error);
}

TEST(Workflow, FailingStylerDegradesEveryEntry) {
  auto be = fixtures::stub_backends();
  be.styler = std::make_shared<BrokenStyler>();
  MemoryBlobStore blobs;
  auto m = run_workflow(fixtures::corpus()[1], text::Variant::sentence, 7, be, blobs);
  for (const auto& e : m.entries) {
    EXPECT_TRUE(e.style_degraded);
    EXPECT_EQ(e.stylized_ref, e.candidates[e.selected_index].image_ref);
  }
}

TEST(Manifest, JsonRoundTripAndIdStability) {
  auto be = fixtures::stub_backends();
  MemoryBlobStore blobs;
  auto m = run_workflow(fixtures::corpus()[2], text::Variant::keyword, 3, be, blobs);
  EXPECT_EQ(json(m).get<ImageManifest>(), m);
  EXPECT_EQ(manifest_id("s", text::Variant::sentence, 1), manifest_id("s", text::Variant::sentence, 1));
  EXPECT_NE(manifest_id("s", text::Variant::sentence, 1), manifest_id("s", text::Variant::keyword, 1));
  EXPECT_EQ(manifest_id("s", text::Variant::sentence, 1).size(), 9u + 16u);
}
