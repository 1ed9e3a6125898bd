#pragma once

#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "retell/backends/registry.hpp"
#include "retell/core/document_store.hpp"
#include "retell/feedback/calibration.hpp"
#include "retell/image/blob_store.hpp"
#include "retell/image/workflow.hpp"
#include "retell/materials/generate.hpp"
#include "retell/materials/repository.hpp"
#include "retell/service/config.hpp"
#include "retell/session/session.hpp"
#include "retell/text/segment.hpp"

namespace retell::service {

using nlohmann::json;

inline double wall_clock_seconds() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

inline std::string random_session_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  auto a = rng();
  auto b = rng();
  Bytes raw(16);
  for (int i = 0; i < 8; ++i) {
    raw[i] = static_cast<std::uint8_t>(a >> (8 * i));
    raw[8 + i] = static_cast<std::uint8_t>(b >> (8 * i));
  }
  return "session-" + to_hex(raw);
}

struct ServiceSettings {
  feedback::FeedbackConfig feedback;
  session::RoundSchedule schedule;
  image::WorkflowOptions workflow;
  materials::GenerateOptions generation;
};

enum class JobStatus { pending, running, done, failed };

inline std::string to_string(JobStatus s) {
  switch (s) {
    case JobStatus::pending: return "pending";
    case JobStatus::running: return "running";
    case JobStatus::done: return "done";
    case JobStatus::failed: return "failed";
  }
  return "pending";
}

struct ManifestJob {
  std::string id;
  std::string story_id;
  text::Variant variant = text::Variant::sentence;
  std::int64_t seed = 0;
  JobStatus status = JobStatus::pending;
  std::optional<ErrorCode> error_code;
  std::string error;
};

inline json to_json(const ManifestJob& j) {
  json out = {{"id", j.id},
              {"story_id", j.story_id},
              {"variant", text::to_string(j.variant)},
              {"seed", j.seed},
              {"status", to_string(j.status)}};
  if (j.error_code) out["error"] = {{"code", to_string(*j.error_code)}, {"message", j.error}};
  return out;
}

struct CreateSessionRequest {
  std::string story_id;
  std::optional<std::string> manifest_id;
  std::optional<std::string> learner_id;
  std::optional<double> deadline_seconds;
};

// Binds stories, manifests, images and sessions to storage and backends.
// Transport-agnostic: the HTTP layer only parses requests and renders results.
class Service {
 public:
  using IdSource = std::function<std::string()>;

  Service(backends::Backends be, std::shared_ptr<DocumentStore> docs, std::shared_ptr<image::BlobStore> blobs,
          ServiceSettings settings = {}, session::Clock clock = wall_clock_seconds,
          IdSource session_ids = random_session_id)
      : be_(std::move(be)),
        docs_(std::move(docs)),
        blobs_(std::move(blobs)),
        stories_(docs_),
        settings_(std::move(settings)),
        clock_(std::move(clock)),
        session_ids_(std::move(session_ids)) {
    settings_.feedback.validate();
    settings_.schedule.validate();
  }

  explicit Service(const ServiceConfig& cfg)
      : Service(backends::make_backends(cfg.adapters),
                std::make_shared<FileDocumentStore>(cfg.storage_root / "documents"),
                std::make_shared<image::FileBlobStore>(cfg.storage_root / "images"),
                ServiceSettings{cfg.feedback, cfg.schedule, {}, {}}) {}

  ~Service() {
    std::vector<std::thread> workers;
    {
      std::lock_guard lock(jobs_mu_);
      workers.swap(workers_);
    }
    for (auto& t : workers) t.join();
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  const ServiceSettings& settings() const { return settings_; }
  const backends::Backends& backends() const { return be_; }
  image::BlobStore& blobs() { return *blobs_; }

  // Stories

  // {"words": [...], "max_words"?} generates; {"text", "word_set"} imports.
  materials::Story create_story(const json& body) {
    require(body.is_object(), "story request must be a JSON object");
    materials::Story story;
    if (body.contains("text")) {
      story = body.get<materials::Story>();
      story.provenance = materials::Provenance::imported;
      auto report = materials::validate_story(story);
      if (!report.missing.empty()) {
        fail(ErrorCode::material_inconsistency, "story is missing target words: " + text::join(report.missing, ", "));
      }
    } else {
      require(body.contains("words"), "story request needs 'text' and 'word_set', or 'words'");
      materials::WordSet ws;
      body.at("words").get_to(ws.words);
      ws.id = body.value("word_set_id", materials::derive_word_set_id(ws.words));
      auto opts = settings_.generation;
      opts.max_words = body.value("max_words", opts.max_words);
      require(be_.text_generator != nullptr, "no text generator configured");
      story = materials::generate_story(ws, *be_.text_generator, opts);
    }
    stories_.store_story(story);
    return story;
  }

  materials::Story get_story(const std::string& id) const { return stories_.load_story(id); }

  std::vector<materials::StorySummary> list_stories() const { return stories_.list_stories(); }

  materials::ValidationReport validate_story(const std::string& id) const {
    return materials::validate_story(stories_.load_story(id));
  }

  std::vector<bool> detect(const std::string& story_id, const std::string& transcript) const {
    return feedback::detect_spoken_words(transcript, stories_.load_story(story_id).word_set.words);
  }

  // Manifests

  // Idempotent in (story, variant, seed). With `wait`, blocks until the job
  // settles; otherwise the job runs in the background and is polled.
  ManifestJob request_manifest(const std::string& story_id, text::Variant variant, std::int64_t seed,
                               bool wait = false) {
    auto story = stories_.load_story(story_id);
    const auto id = image::manifest_id(story.id, variant, seed);
    {
      std::unique_lock lock(jobs_mu_);
      if (docs_->get(kManifests, id)) return done_job(id, story.id, variant, seed);
      auto it = jobs_.find(id);
      bool start = it == jobs_.end() || it->second.status == JobStatus::failed;
      if (start) {
        jobs_[id] = {id, story.id, variant, seed, JobStatus::pending, std::nullopt, ""};
        workers_.emplace_back([this, story, variant, seed, id] { run_job(story, variant, seed, id); });
      }
      if (!wait) return jobs_.at(id);
      jobs_cv_.wait(lock, [&] {
        auto s = jobs_.at(id).status;
        return s == JobStatus::done || s == JobStatus::failed;
      });
      return jobs_.at(id);
    }
  }

  ManifestJob manifest_status(const std::string& id) const {
    std::lock_guard lock(jobs_mu_);
    if (auto it = jobs_.find(id); it != jobs_.end()) return it->second;
    if (auto doc = docs_->get(kManifests, id)) {
      auto m = doc->get<image::ImageManifest>();
      return done_job(m.id, m.story_id, m.variant, m.seed);
    }
    fail(ErrorCode::not_found, "unknown manifest: " + id);
  }

  std::optional<image::ImageManifest> find_manifest(const std::string& id) const {
    auto doc = docs_->get(kManifests, id);
    if (!doc) return std::nullopt;
    return doc->get<image::ImageManifest>();
  }

  image::ImageManifest get_manifest(const std::string& id) const {
    if (auto m = find_manifest(id)) return *m;
    auto job = manifest_status(id);
    if (job.status == JobStatus::failed) fail(job.error_code.value_or(ErrorCode::backend), job.error);
    fail(ErrorCode::protocol, "manifest " + id + " is " + to_string(job.status));
  }

  Bytes image(const std::string& ref) const {
    if (!image::BlobStore::valid_ref(ref)) fail(ErrorCode::not_found, "unknown image: " + ref);
    return blobs_->at(ref);
  }

  // Sessions

  session::SessionState create_session(const CreateSessionRequest& req) {
    auto ctx = session_context(req.story_id, req.manifest_id);
    session::SessionOptions opts{settings_.schedule, req.deadline_seconds, req.learner_id};
    auto entry = std::make_shared<SessionEntry>();
    entry->session = std::make_unique<session::Session>(session_ids_(), std::move(ctx), clock_, opts);
    auto state = entry->session->state();
    persist(state);
    std::lock_guard lock(sessions_mu_);
    sessions_[state.id] = entry;
    return state;
  }

  session::SessionState get_session(const std::string& id) {
    return with_session(id, [](session::Session& s) { return s.state(); });
  }

  session::RoundContext begin_round(const std::string& id) {
    return with_session(id, [&](session::Session& s) {
      auto r = s.begin_round();
      persist(s.state());
      return r;
    });
  }

  session::RoundRecord end_round(const std::string& id, const std::string& transcript, bool edited) {
    return with_session(id, [&](session::Session& s) {
      auto r = s.end_round(transcript, edited);
      persist(s.state());
      return r;
    });
  }

  session::SessionState finish_session(const std::string& id) {
    return with_session(id, [&](session::Session& s) {
      s.finish();
      auto state = s.state();
      persist(state);
      return state;
    });
  }

  session::ReviewView review(const std::string& id, int round_index) {
    return with_session(id, [&](session::Session& s) { return s.review_view(round_index); });
  }

  session::SessionSummary summary(const std::string& id) {
    return with_session(id, [](session::Session& s) { return s.summary(); });
  }

  // The context a session for this story (and optional manifest) runs with.
  session::SessionContext session_context(const std::string& story_id,
                                          const std::optional<std::string>& manifest_id) const {
    session::SessionContext ctx;
    ctx.story = stories_.load_story(story_id);
    ctx.units = text::segment_sentences(ctx.story.text);
    if (manifest_id) {
      auto m = find_manifest(*manifest_id);
      if (!m) {
        std::lock_guard lock(jobs_mu_);
        if (jobs_.contains(*manifest_id)) fail(ErrorCode::protocol, "manifest " + *manifest_id + " is not ready");
        fail(ErrorCode::not_found, "unknown manifest: " + *manifest_id);
      }
      ctx.manifest = std::move(m);
    }
    ctx.feedback = settings_.feedback;
    ctx.embedder = be_.sentence_embedder;
    require(ctx.embedder != nullptr, "no sentence embedder configured");
    return ctx;
  }

  // Calibration

  feedback::Calibration calibrate(const std::string& csv) const {
    auto labeled = feedback::parse_labeled_csv(csv);
    return feedback::calibrate_threshold(labeled);
  }

 private:
  static constexpr const char* kManifests = "manifests";
  static constexpr const char* kSessions = "sessions";

  struct SessionEntry {
    std::mutex mu;  // serializes operation + persistence
    std::unique_ptr<session::Session> session;
  };

  static ManifestJob done_job(const std::string& id, const std::string& story_id, text::Variant v,
                              std::int64_t seed) {
    return {id, story_id, v, seed, JobStatus::done, std::nullopt, ""};
  }

  void run_job(const materials::Story& story, text::Variant variant, std::int64_t seed, const std::string& id) {
    set_status(id, JobStatus::running, std::nullopt, "");
    try {
      auto m = image::run_workflow(story, variant, seed, be_, *blobs_, settings_.workflow);
      docs_->put(kManifests, m.id, json(m));
      set_status(id, JobStatus::done, std::nullopt, "");
    } catch (const Error& e) {
      set_status(id, JobStatus::failed, e.code(), e.what());
    } catch (const std::exception& e) {
      set_status(id, JobStatus::failed, ErrorCode::io, e.what());
    }
  }

  void set_status(const std::string& id, JobStatus s, std::optional<ErrorCode> code, const std::string& msg) {
    {
      std::lock_guard lock(jobs_mu_);
      auto& job = jobs_.at(id);
      job.status = s;
      job.error_code = code;
      job.error = msg;
    }
    jobs_cv_.notify_all();
  }

  void persist(const session::SessionState& state) {
    docs_->put(kSessions, state.id, {{"events", state.event_log}});
  }

  std::shared_ptr<SessionEntry> load_entry(const std::string& id) {
    {
      std::lock_guard lock(sessions_mu_);
      if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
    }
    auto doc = docs_->get(kSessions, id);
    if (!doc) fail(ErrorCode::not_found, "unknown session: " + id);
    auto events = doc->at("events").get<std::vector<session::Event>>();
    require(!events.empty(), "stored session has no events");
    const auto& start = events.front().data;
    std::optional<std::string> manifest;
    if (!start.at("manifest_id").is_null()) manifest = start["manifest_id"].get<std::string>();
    auto entry = std::make_shared<SessionEntry>();
    entry->session = session::Session::replay(
        events, session_context(start.at("story_id").get<std::string>(), manifest), clock_);
    std::lock_guard lock(sessions_mu_);
    return sessions_.try_emplace(id, entry).first->second;
  }

  template <typename F>
  std::invoke_result_t<F, session::Session&> with_session(const std::string& id, F&& f) {
    auto entry = load_entry(id);
    std::lock_guard lock(entry->mu);
    return f(*entry->session);
  }

  backends::Backends be_;
  std::shared_ptr<DocumentStore> docs_;
  std::shared_ptr<image::BlobStore> blobs_;
  materials::StoryRepository stories_;
  ServiceSettings settings_;
  session::Clock clock_;
  IdSource session_ids_;

  mutable std::mutex jobs_mu_;
  std::condition_variable jobs_cv_;
  std::map<std::string, ManifestJob> jobs_;
  std::vector<std::thread> workers_;

  std::mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<SessionEntry>> sessions_;
};

}  // namespace retell::service
