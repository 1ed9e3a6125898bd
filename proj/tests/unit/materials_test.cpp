#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "retell/backends/stubs.hpp"
#include "retell/materials/generate.hpp"
#include "retell/materials/repository.hpp"

using namespace retell;
using namespace retell::materials;

namespace {

std::string words_of_length(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i);
  return s;
}

}  // namespace

TEST(WordSet, RejectsBadInput) {
  EXPECT_THROW(make_word_set({}), Error);
  EXPECT_THROW(make_word_set({"harbor", "Harbor"}), Error);
  EXPECT_THROW(make_word_set({"two words"}), Error);
  EXPECT_THROW(make_word_set({"  "}), Error);
  auto ws = make_word_set({"Serene", "harbor"});
  EXPECT_EQ(ws.words[0].surface, "serene");
  EXPECT_EQ(ws.id, derive_word_set_id(ws.words));
  EXPECT_EQ(make_word_set({"serene", "harbor"}, "set-1").id, "set-1");
}

TEST(Validate, AllWordsPresent) {
  auto s = fixtures::story(words_of_length(56) + " serene harbor", {"serene", "harbor"});
  auto r = validate_story(s);
  EXPECT_TRUE(r.missing.empty());
  EXPECT_EQ(r.word_count, 58u);
  EXPECT_FALSE(r.over_length);
  EXPECT_TRUE(r.ok());
}

TEST(Validate, MissingWordIsListed) {
  auto r = validate_story(fixtures::story("A serene morning by the sea.", {"serene", "harbor"}));
  EXPECT_EQ(r.missing, (std::vector<std::string>{"harbor"}));
  EXPECT_FALSE(r.ok());
}

TEST(Validate, InflectedFormsCount) {
  auto r = validate_story(fixtures::story("Boats filled the harbors and she was hoping.", {"harbor", "hope"}));
  EXPECT_TRUE(r.missing.empty());
}

TEST(Validate, OverLengthThreshold) {
  auto s = fixtures::story(words_of_length(95) + " harbor", {"harbor"});
  EXPECT_TRUE(validate_story(s).over_length);
  s.text = words_of_length(89) + " harbor";  // 90 words, exactly 1.5x
  EXPECT_FALSE(validate_story(s).over_length);
  s.text = words_of_length(90) + " harbor";
  EXPECT_TRUE(validate_story(s).over_length);
}

TEST(Validate, CorpusIsClean) {
  auto stories = fixtures::corpus();
  ASSERT_EQ(stories.size(), 20u);
  for (const auto& s : stories) {
    auto r = validate_story(s);
    EXPECT_TRUE(r.ok()) << s.id;
    EXPECT_LE(r.word_count, 60u) << s.id;
    EXPECT_GE(s.word_set.words.size(), 6u);
    EXPECT_LE(s.word_set.words.size(), 7u);
  }
}

TEST(Prompt, ExactPhrasing) {
  EXPECT_EQ(story_prompt(make_word_set({"serene"})),
            "generate a short story that has no more than 60 words and must contain the words 'serene'");
  EXPECT_EQ(story_prompt(make_word_set({"serene", "harbor"})),
            "generate a short story that has no more than 60 words and must contain the words 'serene' and "
            "'harbor'");
  EXPECT_EQ(story_prompt(make_word_set({"a", "b", "c"}), 40),
            "generate a short story that has no more than 40 words and must contain the words 'a', 'b', and 'c'");
}

TEST(Generate, FixedReplyWithAllWords) {
  const std::string reply =
      "The harbor was serene at dawn. Fishermen loaded their boats and talked quietly about the weather. "
      "Gulls circled above the water while children ran along the pier, laughing and waving at the sailors "
      "who left for the open sea.";
  backends::FixedTextGenerator llm(reply);
  auto s = generate_story(make_word_set({"serene", "harbor"}), llm);
  EXPECT_EQ(s.text, reply);
  EXPECT_EQ(s.provenance, Provenance::generated);
  EXPECT_TRUE(validate_story(s).missing.empty());
  EXPECT_FALSE(s.id.empty());
  ASSERT_EQ(llm.prompts().size(), 1u);
}

TEST(Generate, MissingWordFailsAfterRetries) {
  auto ws = make_word_set({"serene", "harbor", "lantern", "voyage", "anchor", "gull", "tide"});
  backends::FixedTextGenerator llm("A serene harbor. A lantern, a voyage, an anchor, a gull.");
  try {
    generate_story(ws, llm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::generation_failed);
    EXPECT_NE(std::string(e.what()).find("tide"), std::string::npos);
    EXPECT_EQ(std::string(e.what()).find("serene"), std::string::npos);
  }
  EXPECT_EQ(llm.prompts().size(), 4u);
}

TEST(Generate, RetrySucceedsOnLaterReply) {
  backends::SequenceTextGenerator llm({"Nothing here.", "Still nothing.", "A serene harbor."});
  auto s = generate_story(make_word_set({"serene", "harbor"}), llm);
  EXPECT_EQ(s.text, "A serene harbor.");
  EXPECT_EQ(llm.calls(), 3u);
}

TEST(Generate, RetryBudgetIsConfigurable) {
  backends::SequenceTextGenerator llm({"Nothing here.", "A serene harbor."});
  EXPECT_THROW(generate_story(make_word_set({"serene", "harbor"}), llm, {60, 0}), Error);
  EXPECT_EQ(llm.calls(), 1u);
}

TEST(Generate, BackendErrorPropagates) {
  class Down : public backends::TextGenerator {
   public:
    std::string generate(const std::string&) override { throw BackendError("llm", "unreachable", true); }
  } llm;
  try {
    generate_story(make_word_set({"serene"}), llm);
    FAIL();
  } catch (const BackendError& e) {
    EXPECT_TRUE(e.retryable());
  }
}

TEST(Generate, TemplateStubAlwaysValid) {
  backends::TemplateTextGenerator llm;
  for (const auto& s : fixtures::corpus()) {
    auto g = generate_story(s.word_set, llm);
    EXPECT_TRUE(validate_story(g).missing.empty()) << s.id;
  }
}

TEST(StoryJson, RoundTrip) {
  for (const auto& s : fixtures::corpus()) {
    json j = s;
    EXPECT_EQ(j.get<Story>(), s);
  }
  auto s = fixtures::story("A serene harbor.", {"serene", "harbor"});
  s.word_set.words[0].phonetic = "/səˈriːn/";
  s.word_set.words[0].definitions = {"calm", "平静的"};
  EXPECT_EQ(json(s).get<Story>(), s);
}

TEST(StoryJson, DefaultsAndBareWords) {
  auto s = json::parse(R"({"text":"A serene harbor.","word_set":{"words":["serene","harbor"]}})").get<Story>();
  EXPECT_EQ(s.max_words, 60);
  EXPECT_EQ(s.provenance, Provenance::imported);
  EXPECT_FALSE(s.id.empty());
  EXPECT_FALSE(s.word_set.id.empty());
  EXPECT_THROW(json::parse(R"({"text":"x","word_set":{"words":["a"]},"provenance":"found"})").get<Story>(), Error);
  EXPECT_THROW(json::parse(R"({"text":"x","word_set":{"words":["a"]},"max_words":0})").get<Story>(), Error);
}

template <typename Make>
void exercise_repository(Make make) {
  auto repo = make();
  auto stories = fixtures::corpus();
  for (int i = 0; i < 3; ++i) repo.store_story(stories[i]);
  EXPECT_EQ(repo.load_story(stories[1].id), stories[1]);
  auto list = repo.list_stories();
  ASSERT_EQ(list.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(list[i].id, stories[i].id);
  EXPECT_EQ(list[0].words.size(), stories[0].word_set.words.size());
  try {
    repo.load_story("story-missing");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_found);
  }
}

TEST(Repository, MemoryRoundTrip) {
  exercise_repository([] { return StoryRepository(std::make_shared<MemoryDocumentStore>()); });
}

TEST(Repository, FileRoundTripSurvivesReopen) {
  auto dir = fixtures::temp_dir("stories");
  exercise_repository([&] { return StoryRepository(std::make_shared<FileDocumentStore>(dir)); });
  StoryRepository reopened(std::make_shared<FileDocumentStore>(dir));
  auto s = fixtures::corpus()[2];
  EXPECT_EQ(reopened.load_story(s.id), s);
  std::filesystem::remove_all(dir);
}
