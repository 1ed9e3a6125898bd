#pragma once

#include <unistd.h>

#include <array>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "retell/backends/interfaces.hpp"
#include "retell/core/digest.hpp"
#include "retell/core/error.hpp"

// JSON request/response adapters. The same message shapes travel over HTTP
// (remote) or stdin/stdout of a local command:
//   text generator   {prompt}                 -> {text}
//   coref resolver   {text}                   -> {clusters:[{main:[b,e], mentions:[[b,e],...]}]}
//   text-to-image    {prompt, n, seed}        -> {images:[base64 png, ...]}
//   cross-modal      {text} | {image: base64} -> {embedding:[...]}
//   sentence embed   {sentences:[...]}        -> {embeddings:[[...], ...]}
//   styler           {image: base64}          -> {image: base64}
namespace retell::backends {

using nlohmann::json;
using Transport = std::function<json(const json&)>;

// POST to http://host:port/path.
inline Transport http_transport(const std::string& url, int timeout_seconds = 120) {
  auto scheme = url.find("://");
  require(scheme != std::string::npos, "endpoint must be an absolute http URL: " + url);
  auto slash = url.find('/', scheme + 3);
  std::string base = slash == std::string::npos ? url : url.substr(0, slash);
  std::string path = slash == std::string::npos ? "/" : url.substr(slash);
  return [base, path, url, timeout_seconds](const json& request) -> json {
    httplib::Client client(base);
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);
    client.set_write_timeout(timeout_seconds, 0);
    auto res = client.Post(path, request.dump(), "application/json");
    if (!res) throw BackendError(url, "request failed: " + httplib::to_string(res.error()), true);
    if (res->status != 200) {
      throw BackendError(url, "HTTP " + std::to_string(res->status) + ": " + res->body, res->status >= 500);
    }
    try {
      return json::parse(res->body);
    } catch (const json::exception& e) {
      throw BackendError(url, std::string("malformed response: ") + e.what(), false);
    }
  };
}

// Runs `command` with the request on stdin and parses stdout.
inline Transport command_transport(const std::string& command) {
  return [command](const json& request) -> json {
    static std::atomic<std::uint64_t> counter{0};
    auto tmp = std::filesystem::temp_directory_path() /
               ("retell-req-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".json");
    {
      std::ofstream out(tmp);
      out << request.dump();
    }
    std::string cmd = command + " < '" + tmp.string() + "'";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
      std::filesystem::remove(tmp);
      throw BackendError(command, "cannot start command", true);
    }
    std::string output;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) output.append(buf.data(), got);
    int status = ::pclose(pipe);
    std::filesystem::remove(tmp);
    if (status != 0) throw BackendError(command, "exit status " + std::to_string(status), true);
    try {
      return json::parse(output);
    } catch (const json::exception& e) {
      throw BackendError(command, std::string("malformed output: ") + e.what(), false);
    }
  };
}

namespace detail {

template <typename T>
T field(const json& response, const char* key, const std::string& backend) {
  try {
    return response.at(key).get<T>();
  } catch (const json::exception& e) {
    throw BackendError(backend, std::string("response field '") + key + "': " + e.what(), false);
  }
}

}  // namespace detail

class JsonTextGenerator : public TextGenerator {
 public:
  explicit JsonTextGenerator(Transport t) : t_(std::move(t)) {}
  std::string generate(const std::string& prompt) override {
    return detail::field<std::string>(t_({{"prompt", prompt}}), "text", "text-generator");
  }

 private:
  Transport t_;
};

class JsonCorefResolver : public CorefResolver {
 public:
  explicit JsonCorefResolver(Transport t) : t_(std::move(t)) {}
  std::vector<CorefCluster> resolve(const std::string& text) override {
    auto clusters = detail::field<json>(t_({{"text", text}}), "clusters", "coref");
    std::vector<CorefCluster> out;
    try {
      for (const auto& c : clusters) {
        CorefCluster cc;
        cc.main = {c.at("main").at(0).get<std::size_t>(), c.at("main").at(1).get<std::size_t>()};
        for (const auto& m : c.at("mentions")) cc.mentions.push_back({m.at(0).get<std::size_t>(), m.at(1).get<std::size_t>()});
        out.push_back(std::move(cc));
      }
    } catch (const json::exception& e) {
      throw BackendError("coref", std::string("malformed clusters: ") + e.what(), false);
    }
    return out;
  }

 private:
  Transport t_;
};

class JsonTextToImage : public TextToImage {
 public:
  explicit JsonTextToImage(Transport t) : t_(std::move(t)) {}
  std::vector<Bytes> generate(const std::string& prompt, int n, std::int64_t seed) override {
    auto images = detail::field<std::vector<std::string>>(t_({{"prompt", prompt}, {"n", n}, {"seed", seed}}),
                                                          "images", "text-to-image");
    std::vector<Bytes> out;
    for (const auto& b64 : images) out.push_back(base64_decode(b64));
    return out;
  }

 private:
  Transport t_;
};

class JsonCrossModalEmbedder : public CrossModalEmbedder {
 public:
  explicit JsonCrossModalEmbedder(Transport t) : t_(std::move(t)) {}
  Embedding embed_text(const std::string& text) override {
    return detail::field<Embedding>(t_({{"text", text}}), "embedding", "cross-modal");
  }
  Embedding embed_image(const Bytes& png) override {
    return detail::field<Embedding>(t_({{"image", base64_encode(png)}}), "embedding", "cross-modal");
  }

 private:
  Transport t_;
};

class JsonSentenceEmbedder : public SentenceEmbedder {
 public:
  explicit JsonSentenceEmbedder(Transport t) : t_(std::move(t)) {}
  std::vector<Embedding> embed(const std::vector<std::string>& sentences) override {
    auto out = detail::field<std::vector<Embedding>>(t_({{"sentences", sentences}}), "embeddings",
                                                     "sentence-embedder");
    if (out.size() != sentences.size()) throw BackendError("sentence-embedder", "wrong batch size", false);
    return out;
  }

 private:
  Transport t_;
};

class JsonStyler : public Styler {
 public:
  explicit JsonStyler(Transport t) : t_(std::move(t)) {}
  Bytes stylize(const Bytes& png) override {
    return base64_decode(detail::field<std::string>(t_({{"image", base64_encode(png)}}), "image", "styler"));
  }

 private:
  Transport t_;
};

}  // namespace retell::backends
