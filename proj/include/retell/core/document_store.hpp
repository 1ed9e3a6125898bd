#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "retell/core/digest.hpp"
#include "retell/core/error.hpp"

namespace retell {

using nlohmann::json;

// JSON documents grouped in collections, keyed by id. `list` returns ids in
// first-insertion order. Implementations are safe for concurrent use.
class DocumentStore {
 public:
  virtual ~DocumentStore() = default;
  virtual void put(const std::string& collection, const std::string& id, const json& doc) = 0;
  virtual std::optional<json> get(const std::string& collection, const std::string& id) const = 0;
  virtual std::vector<std::string> list(const std::string& collection) const = 0;
};

class MemoryDocumentStore : public DocumentStore {
 public:
  void put(const std::string& collection, const std::string& id, const json& doc) override {
    std::unique_lock lock(mu_);
    auto& c = collections_[collection];
    if (!c.docs.contains(id)) c.order.push_back(id);
    c.docs[id] = doc;
  }

  std::optional<json> get(const std::string& collection, const std::string& id) const override {
    std::shared_lock lock(mu_);
    auto c = collections_.find(collection);
    if (c == collections_.end()) return std::nullopt;
    auto d = c->second.docs.find(id);
    if (d == c->second.docs.end()) return std::nullopt;
    return std::optional<json>(std::in_place, d->second);
  }

  std::vector<std::string> list(const std::string& collection) const override {
    std::shared_lock lock(mu_);
    auto c = collections_.find(collection);
    return c == collections_.end() ? std::vector<std::string>{} : c->second.order;
  }

 private:
  struct Collection {
    std::vector<std::string> order;
    std::map<std::string, json> docs;
  };
  mutable std::shared_mutex mu_;
  std::map<std::string, Collection> collections_;
};

// <root>/<collection>/<id>.json plus an _index.json holding insertion order.
// Documents are written to a temporary file and renamed into place.
class FileDocumentStore : public DocumentStore {
 public:
  explicit FileDocumentStore(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
  }

  void put(const std::string& collection, const std::string& id, const json& doc) override {
    check_id(id);
    std::unique_lock lock(mu_);
    auto dir = root_ / collection;
    std::filesystem::create_directories(dir);
    write_atomic(dir / (id + ".json"), doc.dump(2));
    auto order = read_index(collection);
    if (std::find(order.begin(), order.end(), id) == order.end()) {
      order.push_back(id);
      write_atomic(dir / "_index.json", json(order).dump());
    }
  }

  std::optional<json> get(const std::string& collection, const std::string& id) const override {
    check_id(id);
    std::shared_lock lock(mu_);
    auto path = root_ / collection / (id + ".json");
    std::ifstream in(path);
    if (!in) return std::nullopt;
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      fail(ErrorCode::io, "corrupt document " + path.string() + ": " + e.what());
    }
  }

  std::vector<std::string> list(const std::string& collection) const override {
    std::shared_lock lock(mu_);
    return read_index(collection);
  }

  const std::filesystem::path& root() const { return root_; }

 private:
  static void check_id(const std::string& id) {
    require(!id.empty() && id.find_first_of("/\\") == std::string::npos && id != "." &&
                id != ".." && id[0] != '_',
            "invalid document id: " + id);
  }

  std::vector<std::string> read_index(const std::string& collection) const {
    std::ifstream in(root_ / collection / "_index.json");
    if (!in) return {};
    return json::parse(in).get<std::vector<std::string>>();
  }

  static void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) fail(ErrorCode::io, "cannot write " + tmp.string());
      out << content;
    }
    std::filesystem::rename(tmp, path);
  }

  std::filesystem::path root_;
  mutable std::shared_mutex mu_;
};

}  // namespace retell
