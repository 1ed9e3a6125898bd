#pragma once

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "retell/backends/heuristic_coref.hpp"
#include "retell/backends/interfaces.hpp"
#include "retell/backends/stubs.hpp"
#include "retell/materials/story.hpp"

namespace fixtures {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(read_file(p)); }

inline std::filesystem::path data_dir() { return RETELL_TEST_DATA; }

inline std::vector<retell::materials::Story> corpus() {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(RETELL_CORPUS)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<retell::materials::Story> out;
  for (const auto& f : files) out.push_back(read_json(f).get<retell::materials::Story>());
  return out;
}

inline retell::materials::Story story(const std::string& text, const std::vector<std::string>& words) {
  retell::materials::Story s;
  s.text = text;
  s.word_set = retell::materials::make_word_set(words);
  s.id = retell::materials::derive_story_id(s.text, s.word_set);
  return s;
}

inline retell::backends::Backends stub_backends() {
  using namespace retell::backends;
  Backends b;
  b.text_generator = std::make_shared<TemplateTextGenerator>();
  b.coref = std::make_shared<HeuristicCorefResolver>();
  b.t2i = std::make_shared<SolidColorTextToImage>(16, 16);
  b.cross_modal = std::make_shared<HashingCrossModalEmbedder>();
  b.sentence_embedder = std::make_shared<HashingSentenceEmbedder>();
  b.styler = std::make_shared<PosterizeStyler>();
  return b;
}

// Advances by `step` seconds on every read.
class StepClock {
 public:
  explicit StepClock(double start = 1000.0, double step = 1.0) : now_(start), step_(step) {}
  double operator()() {
    double t = now_;
    now_ += step_;
    return t;
  }

 private:
  double now_;
  double step_;
};

// Returns scripted times; repeats the last one when exhausted.
class ScriptClock {
 public:
  explicit ScriptClock(std::vector<double> times) : times_(std::make_shared<std::vector<double>>(std::move(times))) {}
  double operator()() {
    auto i = std::min(*next_, times_->size() - 1);
    ++*next_;
    return (*times_)[i];
  }

 private:
  std::shared_ptr<std::vector<double>> times_;
  std::shared_ptr<std::size_t> next_ = std::make_shared<std::size_t>(0);
};

inline std::filesystem::path temp_dir(const std::string& tag) {
  static int counter = 0;
  auto p = std::filesystem::temp_directory_path() /
           ("retell-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace fixtures
