#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "retell/core/digest.hpp"
#include "retell/core/error.hpp"

namespace retell::image {

// Content-addressed PNG storage; the reference is the SHA-256 hex digest
// of the bytes, so identical images are stored once.
class BlobStore {
 public:
  virtual ~BlobStore() = default;
  virtual std::string put(const Bytes& bytes) = 0;
  virtual std::optional<Bytes> get(const std::string& ref) const = 0;

  Bytes at(const std::string& ref) const {
    auto b = get(ref);
    if (!b) fail(ErrorCode::not_found, "unknown image: " + ref);
    return *b;
  }

  static bool valid_ref(const std::string& ref) {
    if (ref.size() != 64) return false;
    for (char c : ref) {
      if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    }
    return true;
  }
};

class MemoryBlobStore : public BlobStore {
 public:
  std::string put(const Bytes& bytes) override {
    auto ref = sha256_hex(bytes);
    std::unique_lock lock(mu_);
    blobs_.try_emplace(ref, bytes);
    return ref;
  }

  std::optional<Bytes> get(const std::string& ref) const override {
    std::shared_lock lock(mu_);
    auto it = blobs_.find(ref);
    if (it == blobs_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mu_);
    return blobs_.size();
  }

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, Bytes> blobs_;
};

// <root>/<hash>.png
class FileBlobStore : public BlobStore {
 public:
  explicit FileBlobStore(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
  }

  std::string put(const Bytes& bytes) override {
    auto ref = sha256_hex(bytes);
    auto path = root_ / (ref + ".png");
    std::unique_lock lock(mu_);
    if (std::filesystem::exists(path)) return ref;
    auto tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) fail(ErrorCode::io, "cannot write " + tmp.string());
      out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    }
    std::filesystem::rename(tmp, path);
    return ref;
  }

  std::optional<Bytes> get(const std::string& ref) const override {
    if (!valid_ref(ref)) return std::nullopt;
    std::shared_lock lock(mu_);
    std::ifstream in(root_ / (ref + ".png"), std::ios::binary);
    if (!in) return std::nullopt;
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }

 private:
  std::filesystem::path root_;
  mutable std::shared_mutex mu_;
};

}  // namespace retell::image
