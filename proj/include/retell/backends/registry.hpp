#pragma once

#include <cstdlib>
#include <map>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "retell/backends/adapters.hpp"
#include "retell/backends/heuristic_coref.hpp"
#include "retell/backends/interfaces.hpp"
#include "retell/backends/stubs.hpp"
#include "retell/core/error.hpp"
#include "retell/core/text.hpp"

namespace retell::backends {

using nlohmann::json;

// One declared adapter. kind: stub | local | remote.
//   stub:   `name` picks an in-repo implementation, `options` configure it
//   local:  `command` is run per call with the JSON request on stdin
//   remote: `endpoint` receives the JSON request as an HTTP POST
struct AdapterConfig {
  std::string kind = "stub";
  std::string name;
  std::string endpoint;
  std::string command;
  int timeout_seconds = 120;
  json options = json::object();
};

inline constexpr const char* kRoles[] = {"text_generator", "coref", "t2i",
                                         "cross_modal", "sentence_embedder", "styler"};

inline AdapterConfig adapter_from_json(const json& j) {
  AdapterConfig a;
  a.kind = j.value("kind", std::string("stub"));
  a.name = j.value("name", std::string{});
  a.endpoint = j.value("endpoint", std::string{});
  a.command = j.value("command", std::string{});
  a.timeout_seconds = j.value("timeout_seconds", 120);
  a.options = j.value("options", json::object());
  if (a.kind != "stub" && a.kind != "local" && a.kind != "remote") {
    fail(ErrorCode::invalid_argument, "unknown adapter kind: " + a.kind);
  }
  if (a.kind == "remote") require(!a.endpoint.empty(), "remote adapter needs an endpoint");
  if (a.kind == "local") require(!a.command.empty(), "local adapter needs a command");
  return a;
}

inline json to_json(const AdapterConfig& a) {
  json j = {{"kind", a.kind}, {"options", a.options}, {"timeout_seconds", a.timeout_seconds}};
  if (!a.name.empty()) j["name"] = a.name;
  if (!a.endpoint.empty()) j["endpoint"] = a.endpoint;
  if (!a.command.empty()) j["command"] = a.command;
  return j;
}

// RETELL_<ROLE>_ENDPOINT turns a role into a remote adapter at that URL.
inline std::map<std::string, AdapterConfig> apply_env_overrides(std::map<std::string, AdapterConfig> adapters) {
  for (const char* role : kRoles) {
    std::string var = "RETELL_" + text::to_lower(role) + "_ENDPOINT";
    for (auto& c : var) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(var.c_str()); v && *v) {
      auto& a = adapters[role];
      a.kind = "remote";
      a.endpoint = v;
    }
  }
  return adapters;
}

namespace detail {

inline Transport transport_for(const AdapterConfig& a) {
  if (a.kind == "remote") return http_transport(a.endpoint, a.timeout_seconds);
  return command_transport(a.command);
}

[[noreturn]] inline void unknown_stub(const std::string& role, const std::string& name) {
  fail(ErrorCode::invalid_argument, "unknown stub '" + name + "' for " + role);
}

}  // namespace detail

inline Backends make_backends(const std::map<std::string, AdapterConfig>& adapters) {
  auto get = [&](const char* role) {
    auto it = adapters.find(role);
    return it == adapters.end() ? AdapterConfig{} : it->second;
  };
  Backends b;

  if (auto a = get("text_generator"); a.kind == "stub") {
    if (a.name.empty() || a.name == "template") {
      b.text_generator = std::make_shared<TemplateTextGenerator>();
    } else if (a.name == "fixed") {
      b.text_generator = std::make_shared<FixedTextGenerator>(a.options.value("text", std::string{}));
    } else {
      detail::unknown_stub("text_generator", a.name);
    }
  } else {
    b.text_generator = std::make_shared<JsonTextGenerator>(detail::transport_for(a));
  }

  if (auto a = get("coref"); a.kind == "stub") {
    if (!a.name.empty() && a.name != "heuristic") detail::unknown_stub("coref", a.name);
    b.coref = std::make_shared<HeuristicCorefResolver>();
  } else {
    b.coref = std::make_shared<JsonCorefResolver>(detail::transport_for(a));
  }

  if (auto a = get("t2i"); a.kind == "stub") {
    if (!a.name.empty() && a.name != "solid") detail::unknown_stub("t2i", a.name);
    b.t2i = std::make_shared<SolidColorTextToImage>(a.options.value("width", 64u), a.options.value("height", 64u));
  } else {
    b.t2i = std::make_shared<JsonTextToImage>(detail::transport_for(a));
  }

  if (auto a = get("cross_modal"); a.kind == "stub") {
    if (!a.name.empty() && a.name != "hashing") detail::unknown_stub("cross_modal", a.name);
    b.cross_modal = std::make_shared<HashingCrossModalEmbedder>(a.options.value("dim", std::size_t{64}));
  } else {
    b.cross_modal = std::make_shared<JsonCrossModalEmbedder>(detail::transport_for(a));
  }

  if (auto a = get("sentence_embedder"); a.kind == "stub") {
    if (!a.name.empty() && a.name != "hashing") detail::unknown_stub("sentence_embedder", a.name);
    b.sentence_embedder = std::make_shared<HashingSentenceEmbedder>(a.options.value("dim", std::size_t{256}));
  } else {
    b.sentence_embedder = std::make_shared<JsonSentenceEmbedder>(detail::transport_for(a));
  }

  if (auto a = get("styler"); a.kind == "stub") {
    if (a.name.empty() || a.name == "identity") {
      b.styler = std::make_shared<IdentityStyler>();
    } else if (a.name == "posterize") {
      b.styler = std::make_shared<PosterizeStyler>(a.options.value("levels", 4));
    } else {
      detail::unknown_stub("styler", a.name);
    }
  } else {
    b.styler = std::make_shared<JsonStyler>(detail::transport_for(a));
  }
  return b;
}

inline std::map<std::string, AdapterConfig> adapters_from_json(const json& j) {
  std::map<std::string, AdapterConfig> out;
  if (j.is_null()) return out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* role : kRoles) known = known || it.key() == role;
    require(known, "unknown backend role: " + it.key());
    out[it.key()] = adapter_from_json(it.value());
  }
  return out;
}

}  // namespace retell::backends
