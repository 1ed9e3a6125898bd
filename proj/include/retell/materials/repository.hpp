#pragma once

#include <memory>
#include <string>
#include <vector>

#include "retell/core/document_store.hpp"
#include "retell/materials/story.hpp"

namespace retell::materials {

struct StorySummary {
  std::string id;
  std::size_t word_count = 0;
  std::vector<std::string> words;
  Provenance provenance = Provenance::imported;
};

inline json to_json(const StorySummary& s) {
  return {{"id", s.id},
          {"word_count", s.word_count},
          {"words", s.words},
          {"provenance", to_string(s.provenance)}};
}

class StoryRepository {
 public:
  explicit StoryRepository(std::shared_ptr<DocumentStore> store) : store_(std::move(store)) {}

  std::string store_story(const Story& story) {
    require(!story.id.empty(), "story id is empty");
    store_->put(kCollection, story.id, json(story));
    return story.id;
  }

  Story load_story(const std::string& id) const {
    auto doc = store_->get(kCollection, id);
    if (!doc) fail(ErrorCode::not_found, "unknown story: " + id);
    return doc->get<Story>();
  }

  bool contains(const std::string& id) const { return store_->get(kCollection, id).has_value(); }

  std::vector<StorySummary> list_stories() const {
    std::vector<StorySummary> out;
    for (const auto& id : store_->list(kCollection)) {
      auto s = load_story(id);
      StorySummary summary{s.id, text::word_count(s.text), {}, s.provenance};
      for (const auto& w : s.word_set.words) summary.words.push_back(w.surface);
      out.push_back(std::move(summary));
    }
    return out;
  }

 private:
  static constexpr const char* kCollection = "stories";
  std::shared_ptr<DocumentStore> store_;
};

}  // namespace retell::materials
