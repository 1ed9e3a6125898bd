#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "retell/core/vector_math.hpp"
#include "retell/eval/wilcoxon.hpp"
#include "retell/image/workflow.hpp"

namespace retell::eval {

using nlohmann::json;

struct VariantCell {
  std::string story_id;
  text::Variant variant = text::Variant::sentence;
  std::string manifest_id;
  double relevance = 0.0;  // mean clamped selected-candidate similarity
  int entries = 0;
};

struct VariantSummary {
  text::Variant variant = text::Variant::sentence;
  double mean = 0.0;
  double standard_error = 0.0;
  int stories = 0;
};

struct PairwiseTest {
  text::Variant a = text::Variant::sentence;
  text::Variant b = text::Variant::whole_story;
  std::optional<WilcoxonResult> result;
  std::string error;  // set when the test is not computable
};

struct ComparisonReport {
  std::int64_t seed = 0;
  std::vector<VariantCell> cells;  // story-major, variant order as requested
  std::vector<VariantSummary> summaries;
  std::vector<PairwiseTest> tests;
  std::vector<image::ImageManifest> manifests;  // not serialized into the report
};

// Automatic stand-in for a human relevance rating: the stored cosine of
// each entry's selected candidate, clamped to [0, 1], averaged per manifest.
inline double relevance_proxy(const image::ImageManifest& m) {
  require(!m.entries.empty(), "manifest has no entries");
  double sum = 0.0;
  for (const auto& e : m.entries) sum += clamp01(e.candidates.at(e.selected_index).similarity);
  return sum / static_cast<double>(m.entries.size());
}

inline ComparisonReport compare_variants(const std::vector<materials::Story>& corpus,
                                         const std::vector<text::Variant>& variants, std::int64_t seed,
                                         const backends::Backends& be, image::BlobStore& blobs,
                                         const image::WorkflowOptions& opts = {}) {
  require(corpus.size() >= 2, "compare_variants needs at least 2 stories");
  require(!variants.empty(), "compare_variants needs at least one variant");

  ComparisonReport report;
  report.seed = seed;
  for (const auto& story : corpus) {
    for (auto v : variants) {
      image::ImageManifest m;
      try {
        m = image::run_workflow(story, v, seed, be, blobs, opts);
      } catch (const Error& e) {
        throw Error(e.code(), "story " + story.id + ", variant " + text::to_string(v) + ": " + e.what());
      }
      report.cells.push_back({story.id, v, m.id, relevance_proxy(m), static_cast<int>(m.entries.size())});
      report.manifests.push_back(std::move(m));
    }
  }

  auto column = [&](text::Variant v) {
    std::vector<double> out;
    for (const auto& c : report.cells) {
      if (c.variant == v) out.push_back(c.relevance);
    }
    return out;
  };

  for (auto v : variants) {
    auto xs = column(v);
    VariantSummary s{v, 0.0, 0.0, static_cast<int>(xs.size())};
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.standard_error = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) /
                                           std::sqrt(static_cast<double>(xs.size()))
                                     : 0.0;
    report.summaries.push_back(s);
  }

  auto has = [&](text::Variant v) { return std::find(variants.begin(), variants.end(), v) != variants.end(); };
  for (auto other : {text::Variant::whole_story, text::Variant::keyword}) {
    if (!has(text::Variant::sentence) || !has(other)) continue;
    auto a = column(text::Variant::sentence);
    auto b = column(other);
    std::vector<std::pair<double, double>> pairs;
    for (std::size_t i = 0; i < a.size(); ++i) pairs.emplace_back(a[i], b[i]);
    PairwiseTest t{text::Variant::sentence, other, std::nullopt, ""};
    try {
      t.result = wilcoxon_signed_rank(pairs);
    } catch (const Error& e) {
      t.error = e.what();
    }
    report.tests.push_back(std::move(t));
  }
  return report;
}

inline json to_json(const ComparisonReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"story_id", c.story_id},
                     {"variant", text::to_string(c.variant)},
                     {"manifest_id", c.manifest_id},
                     {"relevance", c.relevance},
                     {"entries", c.entries}});
  }
  json summaries = json::array();
  for (const auto& s : r.summaries) {
    summaries.push_back({{"variant", text::to_string(s.variant)},
                         {"mean", s.mean},
                         {"standard_error", s.standard_error},
                         {"stories", s.stories}});
  }
  json tests = json::array();
  for (const auto& t : r.tests) {
    json jt = {{"a", text::to_string(t.a)}, {"b", text::to_string(t.b)}};
    if (t.result) {
      jt["result"] = *t.result;
    } else {
      jt["result"] = nullptr;
      jt["error"] = t.error;
    }
    tests.push_back(std::move(jt));
  }
  return {{"seed", r.seed}, {"cells", cells}, {"summaries", summaries}, {"tests", tests}};
}

// story_id,variant,relevance,entries
inline std::string to_csv(const ComparisonReport& r) {
  std::string out = "story_id,variant,relevance,entries\n";
  for (const auto& c : r.cells) {
    out += c.story_id + "," + text::to_string(c.variant) + "," + json(c.relevance).dump() + "," +
           std::to_string(c.entries) + "\n";
  }
  return out;
}

}  // namespace retell::eval
