#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "retell/text/inflection.hpp"
#include "retell/text/prompts.hpp"
#include "retell/text/segment.hpp"
#include "retell/text/textrank.hpp"

using namespace retell;
using text::segment_sentences;
using nlohmann::json;

namespace {

std::vector<std::string> raws(const std::vector<text::SentenceUnit>& units) {
  std::vector<std::string> out;
  for (const auto& u : units) out.push_back(u.raw);
  return out;
}

// Spans ordered, disjoint, indices consecutive, and everything outside the
// spans is whitespace.
void expect_partition(const std::string& s) {
  auto units = segment_sentences(s);
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < units.size(); ++i) {
    const auto& u = units[i];
    EXPECT_EQ(u.index, static_cast<int>(i));
    ASSERT_LE(cursor, u.span.begin);
    for (auto p = cursor; p < u.span.begin; ++p) EXPECT_TRUE(text::is_space(s[p])) << s;
    EXPECT_EQ(s.substr(u.span.begin, u.span.end - u.span.begin), u.raw);
    EXPECT_FALSE(u.raw.empty());
    cursor = u.span.end;
  }
  for (auto p = cursor; p < s.size(); ++p) EXPECT_TRUE(text::is_space(s[p])) << s;
}

}  // namespace

TEST(Segment, TwoSentences) {
  EXPECT_EQ(raws(segment_sentences("An old man sat by the sea. He smiled.")),
            (std::vector<std::string>{"An old man sat by the sea.", "He smiled."}));
}

TEST(Segment, NoTerminalPunctuation) {
  EXPECT_EQ(raws(segment_sentences("Hello world")), (std::vector<std::string>{"Hello world"}));
}

TEST(Segment, TitleAbbreviationIsNotABoundary) {
  EXPECT_EQ(raws(segment_sentences("Mr. Smith left. He ran.")),
            (std::vector<std::string>{"Mr. Smith left.", "He ran."}));
  EXPECT_EQ(segment_sentences("Dr. J. Watson arrived. She waved.").size(), 2u);
}

TEST(Segment, QuotesAndMixedTerminators) {
  auto units = segment_sentences("\"Run!\" she said. Why? Because it rained... Then it stopped.");
  EXPECT_EQ(raws(units), (std::vector<std::string>{"\"Run!\" she said.", "Why?", "Because it rained...",
                                                   "Then it stopped."}));
}

TEST(Segment, LowercaseContinuationStaysTogether) {
  EXPECT_EQ(segment_sentences("It cost 3.5 dollars. ok then. Fine.").size(), 2u);
}

TEST(Segment, EmptyTextIsAnError) {
  for (const char* s : {"", "   ", "\n\t"}) {
    try {
      segment_sentences(s);
      FAIL() << "expected empty_input";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::empty_input);
    }
  }
}

TEST(Segment, PartitionOnCorpus) {
  for (const auto& s : fixtures::corpus()) {
    expect_partition(s.text);
    EXPECT_EQ(segment_sentences(s.text).size(), 5u) << s.id;
  }
}

TEST(Segment, PartitionOnRandomText) {
  std::mt19937 rng(11);
  const std::vector<std::string> pieces = {"Tom", "ran", "Mr.", "A.", "the", "sea", ".", "!", "?", "\"",
                                           " ",   "  ",  "\n",  "x",  "It",  "3.5", "'", ")", "Yes."};
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    int len = 1 + static_cast<int>(rng() % 25);
    for (int i = 0; i < len; ++i) {
      s += pieces[rng() % pieces.size()];
      if (rng() % 2) s += ' ';
    }
    if (text::is_blank(s)) continue;
    expect_partition(s);
  }
}

TEST(Inflection, DetectionRules) {
  EXPECT_TRUE(text::contains_word("The harbors were full.", "harbor"));
  EXPECT_FALSE(text::contains_word("A harbinger of doom.", "harbor"));
  EXPECT_TRUE(text::contains_word("She STOPPED quickly.", "stop"));
  EXPECT_TRUE(text::contains_word("He was hoping.", "hope"));
  EXPECT_TRUE(text::contains_word("They carried it.", "carry"));
  EXPECT_TRUE(text::contains_word("Two boxes.", "box"));
  EXPECT_TRUE(text::contains_word("The harbor's lights.", "harbor"));
  EXPECT_FALSE(text::contains_word("", "harbor"));
  auto forms = text::inflections("study");
  EXPECT_TRUE(forms.contains("studies"));
  EXPECT_TRUE(forms.contains("studied"));
  EXPECT_TRUE(forms.contains("studying"));
}

TEST(Prompts, SentenceVariantUsesResolvedText) {
  auto units = segment_sentences("An old man sat by the sea. He smiled. The sun set. Birds flew. Night came.");
  units[1].resolved = "An old man smiled.";
  auto prompts = text::build_prompts(units, text::Variant::sentence, "ignored");
  ASSERT_EQ(prompts.size(), 5u);
  EXPECT_EQ(prompts[1].prompt, "An old man smiled.");
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    EXPECT_EQ(prompts[i].sentence_index, static_cast<int>(i));
    EXPECT_EQ(prompts[i].prompt, units[i].resolved);
    EXPECT_FALSE(prompts[i].keywords.has_value());
  }
}

TEST(Prompts, WholeStoryIsOneSpec) {
  const std::string story = "An old man sat by the sea. He smiled.";
  auto prompts = text::build_prompts(segment_sentences(story), text::Variant::whole_story, story);
  ASSERT_EQ(prompts.size(), 1u);
  EXPECT_EQ(prompts[0].sentence_index, text::kWholeStoryIndex);
  EXPECT_EQ(prompts[0].sentence_index, -1);
  EXPECT_EQ(prompts[0].prompt, story);
}

TEST(Prompts, KeywordVariantJoinsKeywords) {
  auto units = segment_sentences("An old man sat by the sea.");
  auto prompts = text::build_prompts(units, text::Variant::keyword, units[0].raw);
  ASSERT_EQ(prompts.size(), 1u);
  ASSERT_TRUE(prompts[0].keywords.has_value());
  const std::set<std::string> allowed{"old", "man", "sat", "sea"};
  EXPECT_LE(prompts[0].keywords->size(), 3u);
  for (const auto& k : *prompts[0].keywords) EXPECT_TRUE(allowed.contains(k)) << k;
  EXPECT_EQ(prompts[0].prompt, text::join(*prompts[0].keywords, ", "));
}

TEST(Prompts, CountLaw) {
  for (const auto& s : fixtures::corpus()) {
    auto units = segment_sentences(s.text);
    for (auto v : {text::Variant::sentence, text::Variant::keyword, text::Variant::whole_story}) {
      auto n = text::build_prompts(units, v, s.text).size();
      EXPECT_EQ(n, v == text::Variant::whole_story ? 1u : units.size());
    }
  }
}

TEST(Prompts, VariantNames) {
  for (auto v : {text::Variant::sentence, text::Variant::keyword, text::Variant::whole_story}) {
    EXPECT_EQ(text::variant_from_string(text::to_string(v)), v);
  }
  EXPECT_THROW(text::variant_from_string("collage"), Error);
}

TEST(SentenceJson, RoundTrip) {
  auto units = segment_sentences("An old man sat by the sea. He smiled.");
  units[1].resolved = "An old man smiled.";
  units[1].substitutions.push_back({0, 10, "He", "An old man"});
  json j = units;
  EXPECT_EQ(j[1]["span"], json::array({27, 37}));
  EXPECT_EQ(j.get<std::vector<text::SentenceUnit>>(), units);
}
