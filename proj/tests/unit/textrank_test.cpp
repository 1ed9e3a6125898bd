#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "retell/text/textrank.hpp"

using namespace retell;

namespace {

std::vector<std::string> fixture_sentences() {
  std::vector<std::string> out;
  std::istringstream in(fixtures::read_file(fixtures::data_dir() / "textrank_sentences.txt"));
  std::string line;
  while (std::getline(in, line)) {
    if (!text::is_blank(line)) out.push_back(line);
  }
  return out;
}

}  // namespace

TEST(TextRank, SingleWord) { EXPECT_EQ(text::extract_keywords("cat", 3), (std::vector<std::string>{"cat"})); }

TEST(TextRank, OnlyStopwords) { EXPECT_TRUE(text::extract_keywords("the of and", 3).empty()); }

TEST(TextRank, BlankSentenceIsAnError) {
  try {
    text::extract_keywords("  ", 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::empty_input);
  }
  EXPECT_THROW(text::extract_keywords("cat", 0), Error);
}

TEST(TextRank, GraphUsesWindowTwo) {
  auto g = text::build_word_graph({"a", "b", "c", "a"}, 2);
  EXPECT_EQ(g.nodes, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(g.neighbors[0], (std::set<std::size_t>{1, 2}));
  EXPECT_EQ(g.neighbors[1], (std::set<std::size_t>{0, 2}));
}

TEST(TextRank, StarCenterRanksFirst) {
  // "sea" co-occurs with every other word
  auto g = text::build_word_graph({"boat", "sea", "fish", "sea", "wind", "sea", "sun"}, 2);
  auto s = text::textrank_scores(g);
  auto best = std::max_element(s.begin(), s.end()) - s.begin();
  EXPECT_EQ(g.nodes[best], "sea");
  // fixed point check
  for (std::size_t i = 0; i < s.size(); ++i) {
    double sum = 0;
    for (auto j : g.neighbors[i]) sum += s[j] / static_cast<double>(g.neighbors[j].size());
    EXPECT_NEAR(s[i], 0.15 + 0.85 * sum, 1e-5);
  }
}

TEST(TextRank, TiesGoToFirstOccurrence) {
  // a path graph is symmetric: end nodes tie, middle nodes tie
  EXPECT_EQ(text::extract_keywords("red blue green yellow", 4),
            (std::vector<std::string>{"blue", "green", "red", "yellow"}));
}

TEST(TextRank, MatchesPowerIterationOracleOnFixtures) {
  auto sentences = fixture_sentences();
  ASSERT_EQ(sentences.size(), 10u);
  for (const auto& s : sentences) {
    EXPECT_EQ(text::extract_keywords(s, 3), oracle::pagerank_keywords(s, 3)) << s;
  }
}

TEST(TextRank, MatchesOracleOnRandomSentences) {
  std::mt19937 rng(5);
  const std::vector<std::string> vocab = {"sea", "boat", "old", "man", "fish", "net", "storm", "wave",
                                          "sun", "the", "and", "of", "harbor", "rope"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string s;
    int len = 1 + static_cast<int>(rng() % 14);
    for (int i = 0; i < len; ++i) s += vocab[rng() % vocab.size()] + " ";
    int k = 1 + static_cast<int>(rng() % 4);
    EXPECT_EQ(text::extract_keywords(s, k), oracle::pagerank_keywords(s, k)) << s;
  }
}

TEST(TextRank, Deterministic) {
  for (const auto& s : fixture_sentences()) {
    EXPECT_EQ(text::extract_keywords(s, 3), text::extract_keywords(s, 3));
  }
}
