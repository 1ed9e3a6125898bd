#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "retell/core/error.hpp"
#include "retell/core/text.hpp"
#include "retell/text/stopwords.hpp"

namespace retell::text {

struct TextRankParams {
  int window = 2;  // co-occurrence window, in content words
  double damping = 0.85;
  double tolerance = 1e-6;
  int max_iterations = 1000;
  double tie_epsilon = 1e-9;  // scores closer than this tie; first occurrence wins
};

// Undirected word co-occurrence graph over the content words of a text.
struct WordGraph {
  std::vector<std::string> nodes;                // first-occurrence order
  std::vector<std::set<std::size_t>> neighbors;  // adjacency
};

inline std::vector<std::string> content_words(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& t : tokenize(s)) {
    bool has_alpha = std::any_of(t.lower.begin(), t.lower.end(),
                                 [](unsigned char c) { return std::isalpha(c) != 0; });
    if (has_alpha && !is_stopword(t.lower)) out.push_back(t.lower);
  }
  return out;
}

inline WordGraph build_word_graph(const std::vector<std::string>& words, int window) {
  require(window >= 2, "TextRank window must be >= 2");
  WordGraph g;
  std::vector<std::size_t> ids;
  for (const auto& w : words) {
    auto it = std::find(g.nodes.begin(), g.nodes.end(), w);
    if (it == g.nodes.end()) {
      ids.push_back(g.nodes.size());
      g.nodes.push_back(w);
    } else {
      ids.push_back(static_cast<std::size_t>(it - g.nodes.begin()));
    }
  }
  g.neighbors.resize(g.nodes.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size() && j < i + static_cast<std::size_t>(window); ++j) {
      if (ids[i] == ids[j]) continue;
      g.neighbors[ids[i]].insert(ids[j]);
      g.neighbors[ids[j]].insert(ids[i]);
    }
  }
  return g;
}

// Unweighted TextRank: s_i = (1 - d) + d * sum_{j in N(i)} s_j / deg(j),
// Jacobi iteration from all-ones until the largest change is below tolerance.
inline std::vector<double> textrank_scores(const WordGraph& g, const TextRankParams& p = {}) {
  const auto n = g.nodes.size();
  std::vector<double> score(n, 1.0), next(n);
  for (int iter = 0; iter < p.max_iterations; ++iter) {
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (auto j : g.neighbors[i]) sum += score[j] / static_cast<double>(g.neighbors[j].size());
      next[i] = (1.0 - p.damping) + p.damping * sum;
      delta = std::max(delta, std::abs(next[i] - score[i]));
    }
    score.swap(next);
    if (delta < p.tolerance) break;
  }
  return score;
}

// Up to k content words ranked by TextRank score. Deterministic: ties go to
// the word that occurs first. Stop-word-only input yields an empty list.
inline std::vector<std::string> extract_keywords(std::string_view sentence, int k,
                                                 const TextRankParams& p = {}) {
  if (is_blank(sentence)) fail(ErrorCode::empty_input, "extract_keywords: empty sentence");
  require(k > 0, "extract_keywords: k must be positive");
  const auto graph = build_word_graph(content_words(sentence), p.window);
  const auto score = textrank_scores(graph, p);

  std::vector<bool> taken(graph.nodes.size(), false);
  std::vector<std::string> out;
  while (out.size() < static_cast<std::size_t>(k) && out.size() < graph.nodes.size()) {
    std::size_t best = graph.nodes.size();
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
      if (taken[i]) continue;
      if (best == graph.nodes.size() || score[i] > score[best] + p.tie_epsilon) best = i;
    }
    taken[best] = true;
    out.push_back(graph.nodes[best]);
  }
  return out;
}

}  // namespace retell::text
