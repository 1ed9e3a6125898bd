#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "retell/backends/registry.hpp"
#include "retell/feedback/scoring.hpp"
#include "retell/session/session.hpp"

namespace retell::service {

using nlohmann::json;

struct ServiceConfig {
  std::map<std::string, backends::AdapterConfig> adapters;  // role -> adapter; missing roles use stubs
  feedback::FeedbackConfig feedback;
  session::RoundSchedule schedule;
  std::filesystem::path storage_root = "retell-data";
  std::string host = "127.0.0.1";
  int port = 8080;

  void validate() const {
    feedback.validate();
    schedule.validate();
    require(port >= 0 && port < 65536, "port out of range");
  }
};

// {
//   "backends": {"t2i": {"kind": "remote", "endpoint": "http://..."}, ...},
//   "feedback": {"threshold": 0.7},
//   "schedule": [120, 90, 60],
//   "storage_root": "retell-data",
//   "listen": "127.0.0.1:8080"
// }
inline ServiceConfig config_from_json(const json& j) {
  ServiceConfig c;
  c.adapters = backends::adapters_from_json(j.value("backends", json::object()));
  if (j.contains("feedback")) c.feedback.threshold = j["feedback"].value("threshold", c.feedback.threshold);
  if (j.contains("schedule")) c.schedule.limits = j["schedule"].get<std::vector<double>>();
  if (j.contains("storage_root")) c.storage_root = j["storage_root"].get<std::string>();
  if (j.contains("listen")) {
    auto listen = j["listen"].get<std::string>();
    auto colon = listen.rfind(':');
    require(colon != std::string::npos, "listen must be host:port");
    c.host = listen.substr(0, colon);
    c.port = std::stoi(listen.substr(colon + 1));
  }
  c.adapters = backends::apply_env_overrides(std::move(c.adapters));
  c.validate();
  return c;
}

inline ServiceConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io, "cannot read config " + path.string());
  return config_from_json(json::parse(in));
}

}  // namespace retell::service
