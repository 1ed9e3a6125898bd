#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "retell/backends/interfaces.hpp"
#include "retell/core/error.hpp"
#include "retell/feedback/scoring.hpp"
#include "retell/image/manifest.hpp"
#include "retell/materials/story.hpp"
#include "retell/text/sentence.hpp"

namespace retell::session {

using nlohmann::json;

// Seconds on a server-side clock. Client-supplied times are never used.
using Clock = std::function<double()>;

struct RoundSchedule {
  std::vector<double> limits{120.0, 90.0, 60.0};

  void validate() const {
    require(!limits.empty(), "schedule needs at least one round");
    for (std::size_t i = 0; i < limits.size(); ++i) {
      require(limits[i] > 0.0, "time limits must be positive");
      if (i > 0) require(limits[i] < limits[i - 1], "time limits must be strictly decreasing");
    }
  }

  bool operator==(const RoundSchedule&) const = default;
};

enum class Stage { comprehension, retelling, review, done };

inline std::string to_string(Stage s) {
  switch (s) {
    case Stage::comprehension: return "comprehension";
    case Stage::retelling: return "retelling";
    case Stage::review: return "review";
    case Stage::done: return "done";
  }
  return "comprehension";
}

struct Event {
  double time = 0.0;
  std::string type;  // session_started | retell_started | check | session_finished
  json data;

  bool operator==(const Event&) const = default;
};

struct RoundRecord {
  int round_index = 0;
  feedback::RetellTranscript transcript;
  double limit_seconds = 0.0;
  double spent_seconds = 0.0;
  bool over_limit = false;  // recorded, never rejected
  feedback::RetellReport report;

  bool operator==(const RoundRecord&) const = default;
};

struct SessionState {
  std::string id;
  std::string story_id;
  std::optional<std::string> manifest_id;  // absent: baseline, no images
  std::optional<std::string> learner_id;
  std::optional<double> deadline_seconds;
  Stage stage = Stage::comprehension;
  int round_index = 0;
  RoundSchedule schedule;
  double started_at = 0.0;
  std::vector<RoundRecord> rounds;
  std::vector<Event> event_log;

  bool operator==(const SessionState&) const = default;
};

struct SessionOptions {
  std::optional<RoundSchedule> schedule;
  std::optional<double> deadline_seconds;  // whole-session limit, off by default
  std::optional<std::string> learner_id;
};

struct RoundContext {
  int round_index = 0;
  double limit_seconds = 0.0;
  double started_at = 0.0;
};

struct IncorrectWord {
  materials::TargetWord word;
  double similarity = 0.0;
  std::optional<std::string> matched_sentence;
  std::string story_sentence;
};

struct ReviewView {
  int round_index = 0;
  feedback::RetellReport report;
  std::vector<IncorrectWord> incorrect_words;
  std::set<int> highlighted_sentences;
  std::string story_text;
  std::vector<std::string> sentences;
  std::vector<std::string> images;  // stylized refs in sentence order
};

struct SessionSummary {
  std::vector<double> spent_seconds;
  std::vector<double> overall_similarity;
  std::vector<double> limits;
  std::vector<bool> over_limit;
};

// Everything a session needs besides its own state. Shared by replay.
struct SessionContext {
  materials::Story story;
  std::vector<text::SentenceUnit> units;
  std::optional<image::ImageManifest> manifest;
  feedback::FeedbackConfig feedback;
  std::shared_ptr<backends::SentenceEmbedder> embedder;
};

// Event-sourced practice flow:
//   comprehension (retelling review){1..|limits|} done
// Each operation validates, appends one event and folds it into the state;
// replaying the log through `apply` rebuilds the same state.
class Session {
 public:
  Session(std::string id, SessionContext ctx, Clock clock, const SessionOptions& opts = {})
      : ctx_(std::move(ctx)), clock_(std::move(clock)) {
    require(ctx_.embedder != nullptr, "session: sentence embedder missing");
    if (ctx_.manifest && ctx_.manifest->story_id != ctx_.story.id) {
      fail(ErrorCode::invalid_argument, "manifest " + ctx_.manifest->id + " belongs to story " +
                                            ctx_.manifest->story_id + ", not " + ctx_.story.id);
    }
    auto schedule = opts.schedule.value_or(RoundSchedule{});
    schedule.validate();
    if (opts.deadline_seconds) require(*opts.deadline_seconds > 0.0, "deadline must be positive");

    json data = {{"session_id", id},
                 {"story_id", ctx_.story.id},
                 {"schedule", schedule.limits},
                 {"manifest_id", ctx_.manifest ? json(ctx_.manifest->id) : json(nullptr)},
                 {"learner_id", opts.learner_id ? json(*opts.learner_id) : json(nullptr)},
                 {"deadline_seconds", opts.deadline_seconds ? json(*opts.deadline_seconds) : json(nullptr)}};
    apply({clock_(), "session_started", std::move(data)});
  }

  // Rebuilds a session from its event log.
  static std::unique_ptr<Session> replay(const std::vector<Event>& events, SessionContext ctx, Clock clock) {
    require(!events.empty() && events.front().type == "session_started", "replay: log must start with session_started");
    std::unique_ptr<Session> s(new Session(std::move(ctx), std::move(clock)));
    for (const auto& e : events) s->apply(e);
    return s;
  }

  RoundContext begin_round() {
    std::lock_guard lock(mu_);
    const double now = clock_();
    if (state_.stage == Stage::review && state_.round_index >= static_cast<int>(state_.schedule.limits.size())) {
      fail(ErrorCode::session_complete, "all " + std::to_string(state_.schedule.limits.size()) + " rounds are complete");
    }
    if (state_.deadline_seconds && now - state_.started_at > *state_.deadline_seconds) {
      fail(ErrorCode::session_expired, "session deadline passed");
    }
    apply({now, "retell_started", {{"round_index", state_.round_index}}});
    return {state_.round_index, state_.schedule.limits[state_.round_index], now};
  }

  RoundRecord end_round(const std::string& transcript, bool edited = false) {
    std::lock_guard lock(mu_);
    apply({clock_(), "check", {{"round_index", state_.round_index}, {"text", transcript}, {"edited", edited}}});
    return state_.rounds.back();
  }

  void finish() {
    std::lock_guard lock(mu_);
    apply({clock_(), "session_finished", json::object()});
  }

  ReviewView review_view(int round_index) const {
    std::lock_guard lock(mu_);
    if (round_index < 0 || round_index >= static_cast<int>(state_.rounds.size())) {
      fail(ErrorCode::not_found, "no completed round " + std::to_string(round_index));
    }
    const auto& round = state_.rounds[round_index];
    ReviewView view;
    view.round_index = round_index;
    view.report = round.report;
    view.story_text = ctx_.story.text;
    for (const auto& u : ctx_.units) view.sentences.push_back(u.raw);
    for (const auto& w : round.report.words) {
      if (w.correct) continue;
      view.incorrect_words.push_back({w.word, w.similarity, w.matched_sentence, w.story_sentence});
      view.highlighted_sentences.insert(w.story_sentence_index);
    }
    if (ctx_.manifest) {
      for (const auto& e : ctx_.manifest->entries) view.images.push_back(e.stylized_ref);
    }
    return view;
  }

  SessionSummary summary() const {
    std::lock_guard lock(mu_);
    SessionSummary s;
    for (const auto& r : state_.rounds) {
      s.spent_seconds.push_back(r.spent_seconds);
      s.overall_similarity.push_back(r.report.overall_similarity);
      s.limits.push_back(r.limit_seconds);
      s.over_limit.push_back(r.over_limit);
    }
    return s;
  }

  std::vector<std::string> images() const {
    std::vector<std::string> out;
    if (ctx_.manifest) {
      for (const auto& e : ctx_.manifest->entries) out.push_back(e.stylized_ref);
    }
    return out;
  }

  SessionState state() const {
    std::lock_guard lock(mu_);
    return state_;
  }

  const SessionContext& context() const { return ctx_; }

 private:
  Session(SessionContext ctx, Clock clock) : ctx_(std::move(ctx)), clock_(std::move(clock)) {}

  [[noreturn]] void protocol_error(const std::string& op) const {
    fail(ErrorCode::protocol, op + " not allowed in stage " + to_string(state_.stage));
  }

  void apply(const Event& e) {
    if (e.type == "session_started") {
      if (!state_.event_log.empty()) protocol_error("session_started");
      state_.id = e.data.at("session_id").get<std::string>();
      state_.story_id = e.data.at("story_id").get<std::string>();
      state_.schedule.limits = e.data.at("schedule").get<std::vector<double>>();
      state_.schedule.validate();
      auto opt_string = [&](const char* key) -> std::optional<std::string> {
        auto& v = e.data.at(key);
        return v.is_null() ? std::nullopt : std::optional<std::string>(v.get<std::string>());
      };
      state_.manifest_id = opt_string("manifest_id");
      state_.learner_id = opt_string("learner_id");
      const auto& deadline = e.data.at("deadline_seconds");
      state_.deadline_seconds = deadline.is_null() ? std::nullopt : std::optional<double>(deadline.get<double>());
      if (state_.story_id != ctx_.story.id) fail(ErrorCode::invalid_argument, "replay: story mismatch");
      if (state_.manifest_id.has_value() != ctx_.manifest.has_value() ||
          (ctx_.manifest && *state_.manifest_id != ctx_.manifest->id)) {
        fail(ErrorCode::invalid_argument, "replay: manifest mismatch");
      }
      state_.started_at = e.time;
      state_.stage = Stage::comprehension;
    } else if (e.type == "retell_started") {
      if (state_.stage != Stage::comprehension && state_.stage != Stage::review) protocol_error("begin_round");
      if (state_.round_index >= static_cast<int>(state_.schedule.limits.size())) {
        fail(ErrorCode::session_complete, "all rounds are complete");
      }
      state_.stage = Stage::retelling;
    } else if (e.type == "check") {
      if (state_.stage != Stage::retelling) protocol_error("end_round");
      const double started = retell_started_time();
      RoundRecord r;
      r.round_index = state_.round_index;
      r.transcript = {state_.round_index, e.data.at("text").get<std::string>(),
                      e.data.value("edited", false), started, e.time};
      r.limit_seconds = state_.schedule.limits[state_.round_index];
      r.spent_seconds = std::max(0.0, e.time - started);
      r.over_limit = r.spent_seconds > r.limit_seconds;
      r.report = feedback::score_retelling(ctx_.story, ctx_.units, r.transcript.text, ctx_.feedback,
                                           *ctx_.embedder);
      state_.rounds.push_back(std::move(r));
      state_.round_index += 1;
      state_.stage = Stage::review;
    } else if (e.type == "session_finished") {
      if (state_.stage != Stage::review) protocol_error("finish");
      state_.stage = Stage::done;
    } else {
      fail(ErrorCode::invalid_argument, "unknown event type: " + e.type);
    }
    state_.event_log.push_back(e);
  }

  double retell_started_time() const {
    for (auto it = state_.event_log.rbegin(); it != state_.event_log.rend(); ++it) {
      if (it->type == "retell_started") return it->time;
    }
    fail(ErrorCode::protocol, "no active round");
  }

  SessionContext ctx_;
  Clock clock_;
  mutable std::mutex mu_;
  SessionState state_;
};

// JSON export

inline void to_json(json& j, const Event& e) { j = {{"time", e.time}, {"type", e.type}, {"data", e.data}}; }

inline void from_json(const json& j, Event& e) {
  j.at("time").get_to(e.time);
  j.at("type").get_to(e.type);
  e.data = j.value("data", json::object());
}

inline void to_json(json& j, const RoundRecord& r) {
  j = {{"round_index", r.round_index},
       {"transcript", r.transcript},
       {"limit_seconds", r.limit_seconds},
       {"spent_seconds", r.spent_seconds},
       {"over_limit", r.over_limit},
       {"report", r.report}};
}

inline void to_json(json& j, const SessionState& s) {
  j = {{"id", s.id},
       {"story_id", s.story_id},
       {"manifest_id", s.manifest_id ? json(*s.manifest_id) : json(nullptr)},
       {"learner_id", s.learner_id ? json(*s.learner_id) : json(nullptr)},
       {"deadline_seconds", s.deadline_seconds ? json(*s.deadline_seconds) : json(nullptr)},
       {"stage", to_string(s.stage)},
       {"round_index", s.round_index},
       {"schedule", s.schedule.limits},
       {"started_at", s.started_at},
       {"rounds", s.rounds},
       {"event_log", s.event_log}};
}

inline void to_json(json& j, const RoundContext& r) {
  j = {{"round_index", r.round_index}, {"limit_seconds", r.limit_seconds}, {"started_at", r.started_at}};
}

inline void to_json(json& j, const ReviewView& v) {
  json incorrect = json::array();
  for (const auto& w : v.incorrect_words) {
    incorrect.push_back({{"surface", w.word.surface},
                         {"definitions", w.word.definitions},
                         {"phonetic", w.word.phonetic ? json(*w.word.phonetic) : json(nullptr)},
                         {"similarity", w.similarity},
                         {"matched_sentence", w.matched_sentence ? json(*w.matched_sentence) : json(nullptr)},
                         {"story_sentence", w.story_sentence}});
  }
  j = {{"round_index", v.round_index},
       {"report", v.report},
       {"incorrect_words", incorrect},
       {"highlighted_sentences", v.highlighted_sentences},
       {"story_text", v.story_text},
       {"sentences", v.sentences},
       {"images", v.images}};
}

inline void to_json(json& j, const SessionSummary& s) {
  j = {{"spent_seconds", s.spent_seconds},
       {"overall_similarity", s.overall_similarity},
       {"limits", s.limits},
       {"over_limit", s.over_limit}};
}

}  // namespace retell::session
