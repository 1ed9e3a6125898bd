#pragma once

#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "retell/service/service.hpp"

namespace retell::service {

using nlohmann::json;

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::protocol:
    case ErrorCode::session_complete:
    case ErrorCode::session_expired: return 409;
    case ErrorCode::invalid_argument:
    case ErrorCode::empty_input: return 400;
    case ErrorCode::material_inconsistency:
    case ErrorCode::calibration:
    case ErrorCode::degenerate_input: return 422;
    case ErrorCode::backend:
    case ErrorCode::generation_failed: return 502;
    case ErrorCode::io: return 500;
  }
  return 500;
}

inline json error_body(const Error& e) {
  json err = {{"code", to_string(e.code())}, {"message", e.what()}};
  if (const auto* be = dynamic_cast<const BackendError*>(&e)) {
    err["backend"] = be->backend();
    err["retryable"] = be->retryable();
  }
  if (e.code() == ErrorCode::backend || e.code() == ErrorCode::generation_failed) {
    err["degraded"] = {
        {"hint", "retry later or switch the adapter to a stub"},
        {"fallbacks", {"sessions can run without a manifest (text only)", "stories can be imported instead of generated"}}};
  }
  return {{"error", err}};
}

namespace detail {

inline void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("malformed JSON body: ") + e.what());
  }
}

template <typename T>
std::optional<T> optional_field(const json& body, const char* key) {
  if (!body.contains(key) || body[key].is_null()) return std::nullopt;
  return body[key].get<T>();
}

// Wraps a handler so module errors become JSON error responses.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_json(res, error_body(e), http_status(e.code()));
    } catch (const json::exception& e) {
      send_json(res, error_body(Error(ErrorCode::invalid_argument, e.what())), 400);
    } catch (const std::exception& e) {
      send_json(res, error_body(Error(ErrorCode::io, e.what())), 500);
    }
  };
}

inline int manifest_job_status(const ManifestJob& job) {
  if (job.status == JobStatus::done) return 200;
  if (job.status == JobStatus::failed) return http_status(job.error_code.value_or(ErrorCode::backend));
  return 202;
}

}  // namespace detail

inline CreateSessionRequest session_request_from_json(const json& body) {
  CreateSessionRequest r;
  r.story_id = body.at("story_id").get<std::string>();
  r.manifest_id = detail::optional_field<std::string>(body, "manifest_id");
  r.learner_id = detail::optional_field<std::string>(body, "learner_id");
  r.deadline_seconds = detail::optional_field<double>(body, "deadline_seconds");
  return r;
}

inline json detection_json(const materials::Story& story, const std::vector<bool>& flags) {
  json words = json::array();
  for (std::size_t i = 0; i < flags.size(); ++i) {
    words.push_back({{"surface", story.word_set.words[i].surface}, {"spoken", static_cast<bool>(flags[i])}});
  }
  return {{"story_id", story.id}, {"words", words}};
}

// Every route parses its request, calls one Service operation and renders
// the result with the module's JSON schema.
inline void install_routes(httplib::Server& server, Service& svc) {
  using detail::guarded;
  using detail::send_json;
  using Req = httplib::Request;
  using Res = httplib::Response;

  server.Get("/health", [](const Req&, Res& res) { send_json(res, {{"status", "ok"}}); });

  server.Post("/stories", guarded([&svc](const Req& req, Res& res) {
                send_json(res, svc.create_story(detail::parse_body(req)), 201);
              }));
  server.Get("/stories", guarded([&svc](const Req&, Res& res) {
               json out = json::array();
               for (const auto& s : svc.list_stories()) out.push_back(materials::to_json(s));
               send_json(res, out);
             }));
  server.Get(R"(/stories/([^/]+))", guarded([&svc](const Req& req, Res& res) {
               send_json(res, svc.get_story(req.matches[1]));
             }));
  server.Get(R"(/stories/([^/]+)/validation)", guarded([&svc](const Req& req, Res& res) {
               send_json(res, materials::to_json(svc.validate_story(req.matches[1])));
             }));
  server.Post(R"(/stories/([^/]+)/detect)", guarded([&svc](const Req& req, Res& res) {
                auto body = detail::parse_body(req);
                std::string id = req.matches[1];
                auto flags = svc.detect(id, body.at("transcript").get<std::string>());
                send_json(res, detection_json(svc.get_story(id), flags));
              }));

  server.Post(R"(/stories/([^/]+)/manifests)", guarded([&svc](const Req& req, Res& res) {
                auto variant = text::variant_from_string(
                    req.has_param("variant") ? req.get_param_value("variant") : std::string("sentence"));
                std::int64_t seed = 0;
                if (req.has_param("seed")) {
                  try {
                    seed = std::stoll(req.get_param_value("seed"));
                  } catch (const std::exception&) {
                    fail(ErrorCode::invalid_argument, "seed must be an integer");
                  }
                }
                bool wait = req.has_param("wait") && req.get_param_value("wait") != "0";
                auto job = svc.request_manifest(req.matches[1], variant, seed, wait);
                send_json(res, to_json(job), detail::manifest_job_status(job));
              }));
  server.Get(R"(/manifests/([^/]+)/status)", guarded([&svc](const Req& req, Res& res) {
               auto job = svc.manifest_status(req.matches[1]);
               send_json(res, to_json(job), detail::manifest_job_status(job));
             }));
  server.Get(R"(/manifests/([^/]+))", guarded([&svc](const Req& req, Res& res) {
               std::string id = req.matches[1];
               if (auto m = svc.find_manifest(id)) {
                 send_json(res, *m);
                 return;
               }
               auto job = svc.manifest_status(id);
               if (job.status == JobStatus::failed) svc.get_manifest(id);  // throws the job's error
               send_json(res, to_json(job), 202);
             }));

  server.Get(R"(/images/([0-9a-f]{64}))", guarded([&svc](const Req& req, Res& res) {
               auto bytes = svc.image(req.matches[1]);
               res.set_header("Cache-Control", "public, max-age=31536000, immutable");
               res.set_header("ETag", "\"" + std::string(req.matches[1]) + "\"");
               res.set_content(std::string(bytes.begin(), bytes.end()), "image/png");
             }));

  server.Post("/sessions", guarded([&svc](const Req& req, Res& res) {
                send_json(res, svc.create_session(session_request_from_json(detail::parse_body(req))), 201);
              }));
  server.Get(R"(/sessions/([^/]+))", guarded([&svc](const Req& req, Res& res) {
               send_json(res, svc.get_session(req.matches[1]));
             }));
  server.Post(R"(/sessions/([^/]+)/rounds)", guarded([&svc](const Req& req, Res& res) {
                send_json(res, svc.begin_round(req.matches[1]), 201);
              }));
  server.Post(R"(/sessions/([^/]+)/rounds/current/transcript)", guarded([&svc](const Req& req, Res& res) {
                auto body = detail::parse_body(req);
                auto text = body.at("text").get<std::string>();
                send_json(res, svc.end_round(req.matches[1], text, body.value("edited", false)));
              }));
  server.Get(R"(/sessions/([^/]+)/rounds/(\d+)/review)", guarded([&svc](const Req& req, Res& res) {
               send_json(res, svc.review(req.matches[1], std::stoi(req.matches[2])));
             }));
  server.Get(R"(/sessions/([^/]+)/summary)", guarded([&svc](const Req& req, Res& res) {
               send_json(res, svc.summary(req.matches[1]));
             }));
  server.Post(R"(/sessions/([^/]+)/finish)", guarded([&svc](const Req& req, Res& res) {
                send_json(res, svc.finish_session(req.matches[1]));
              }));

  server.Post("/calibrations", guarded([&svc](const Req& req, Res& res) {
                send_json(res, svc.calibrate(req.body));
              }));
}

}  // namespace retell::service
