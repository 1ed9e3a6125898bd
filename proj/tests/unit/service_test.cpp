#include <gtest/gtest.h>

#include <cstdlib>

#include "contract.hpp"
#include "fixtures.hpp"
#include "retell/service/config.hpp"
#include "retell/service/http.hpp"

using namespace retell;
using namespace retell::service;

TEST(ApiContract, HttpMatchesDirectCalls) {
  auto cases = contract::run_all();
  EXPECT_GE(cases.size(), 35u);
  for (const auto& c : cases) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}

TEST(ErrorMapping, StatusPerCode) {
  EXPECT_EQ(http_status(ErrorCode::not_found), 404);
  EXPECT_EQ(http_status(ErrorCode::protocol), 409);
  EXPECT_EQ(http_status(ErrorCode::session_complete), 409);
  EXPECT_EQ(http_status(ErrorCode::invalid_argument), 400);
  EXPECT_EQ(http_status(ErrorCode::material_inconsistency), 422);
  EXPECT_EQ(http_status(ErrorCode::backend), 502);
  auto body = error_body(BackendError("t2i", "down", true));
  EXPECT_EQ(body["error"]["backend"], "t2i");
  EXPECT_TRUE(body["error"]["retryable"].get<bool>());
  EXPECT_TRUE(body["error"].contains("degraded"));
  EXPECT_FALSE(error_body(Error(ErrorCode::not_found, "x"))["error"].contains("degraded"));
}

TEST(ServiceStore, SessionsSurviveRestart) {
  auto dir = fixtures::temp_dir("service");
  auto make = [&] {
    return std::make_unique<Service>(fixtures::stub_backends(), std::make_shared<FileDocumentStore>(dir / "docs"),
                                     std::make_shared<image::FileBlobStore>(dir / "images"), ServiceSettings{},
                                     fixtures::StepClock(), contract::counting_ids());
  };
  const auto story = fixtures::corpus()[3];
  std::string session_id, manifest_id;
  session::SessionState before;
  {
    auto svc = make();
    svc->create_story(json(story));
    manifest_id = svc->request_manifest(story.id, text::Variant::keyword, 5, true).id;
    session_id = svc->create_session({story.id, manifest_id, std::nullopt, std::nullopt}).id;
    svc->begin_round(session_id);
    svc->end_round(session_id, story.text, false);
    svc->begin_round(session_id);
    before = svc->get_session(session_id);
  }
  auto svc = make();
  EXPECT_EQ(svc->get_story(story.id), story);
  EXPECT_EQ(svc->manifest_status(manifest_id).status, JobStatus::done);
  EXPECT_EQ(svc->get_session(session_id), before);
  auto rec = svc->end_round(session_id, "A retelling.", true);
  EXPECT_EQ(rec.round_index, 1);
  EXPECT_EQ(svc->review(session_id, 0).images.size(), 5u);
  for (const auto& ref : svc->review(session_id, 0).images) EXPECT_FALSE(svc->image(ref).empty());
  std::filesystem::remove_all(dir);
}

TEST(ServiceManifests, ConcurrentRequestsShareOneJob) {
  auto svc = contract::make_service(fixtures::stub_backends());
  const auto story = fixtures::corpus()[4];
  svc->create_story(json(story));
  std::vector<std::thread> threads;
  std::vector<ManifestJob> jobs(8);
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] { jobs[i] = svc->request_manifest(story.id, text::Variant::sentence, 9, true); });
  }
  for (auto& t : threads) t.join();
  for (const auto& j : jobs) {
    EXPECT_EQ(j.status, JobStatus::done);
    EXPECT_EQ(j.id, jobs[0].id);
  }
  EXPECT_EQ(svc->get_manifest(jobs[0].id).entries.size(), 5u);
}

TEST(ServiceManifests, PollingUntilDone) {
  auto svc = contract::make_service(fixtures::stub_backends());
  const auto story = fixtures::corpus()[5];
  svc->create_story(json(story));
  auto job = svc->request_manifest(story.id, text::Variant::whole_story, 2);
  for (int i = 0; i < 500 && svc->manifest_status(job.id).status != JobStatus::done; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  EXPECT_EQ(svc->manifest_status(job.id).status, JobStatus::done);
  EXPECT_EQ(svc->get_manifest(job.id).entries[0].candidates.size(), 10u);
  EXPECT_THROW(svc->manifest_status("manifest-none"), Error);
}

TEST(ServiceSessions, BaselineSessionWithoutManifest) {
  auto svc = contract::make_service(fixtures::stub_backends());
  const auto story = fixtures::corpus()[6];
  svc->create_story(json(story));
  auto s = svc->create_session({story.id, std::nullopt, std::nullopt, std::nullopt});
  EXPECT_EQ(s.id, "session-1");
  svc->begin_round(s.id);
  svc->end_round(s.id, story.text, false);
  EXPECT_TRUE(svc->review(s.id, 0).images.empty());
  EXPECT_TRUE(svc->review(s.id, 0).incorrect_words.empty());
}

TEST(ServiceConfig, ParsesAndOverrides) {
  auto cfg = config_from_json(json::parse(R"({
    "backends": {"styler": {"kind": "stub", "name": "posterize"}},
    "feedback": {"threshold": 0.65},
    "schedule": [100, 50],
    "storage_root": "/tmp/x",
    "listen": "0.0.0.0:9000"
  })"));
  EXPECT_EQ(cfg.feedback.threshold, 0.65);
  EXPECT_EQ(cfg.schedule.limits, (std::vector<double>{100, 50}));
  EXPECT_EQ(cfg.host, "0.0.0.0");
  EXPECT_EQ(cfg.port, 9000);
  EXPECT_EQ(cfg.adapters.at("styler").name, "posterize");
  EXPECT_THROW(config_from_json(json::parse(R"({"feedback": {"threshold": 1.5}})")), Error);
  EXPECT_THROW(config_from_json(json::parse(R"({"schedule": [60, 90]})")), Error);
  EXPECT_THROW(config_from_json(json::parse(R"({"listen": "nowhere"})")), Error);
  EXPECT_THROW(load_config("/nonexistent/retell.json"), Error);

  ::setenv("RETELL_T2I_ENDPOINT", "http://127.0.0.1:9/t2i", 1);
  auto overridden = config_from_json(json::object());
  ::unsetenv("RETELL_T2I_ENDPOINT");
  EXPECT_EQ(overridden.adapters.at("t2i").kind, "remote");
}
