#pragma once

#include <png.h>

#include <cstdint>
#include <span>
#include <vector>

#include "retell/core/digest.hpp"
#include "retell/core/error.hpp"

namespace retell::image {

// 8-bit RGB raster, row-major, no padding.
struct Raster {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> rgb;

  bool operator==(const Raster&) const = default;
};

inline Raster solid(std::uint32_t width, std::uint32_t height, std::uint8_t r, std::uint8_t g,
                    std::uint8_t b) {
  Raster out{width, height, {}};
  out.rgb.reserve(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < static_cast<std::size_t>(width) * height; ++i) {
    out.rgb.push_back(r);
    out.rgb.push_back(g);
    out.rgb.push_back(b);
  }
  return out;
}

inline Bytes encode_png(const Raster& raster) {
  require(raster.width > 0 && raster.height > 0, "encode_png: empty raster");
  require(raster.rgb.size() == static_cast<std::size_t>(raster.width) * raster.height * 3,
          "encode_png: pixel buffer size mismatch");
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = raster.width;
  img.height = raster.height;
  img.format = PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, raster.rgb.data(), 0, nullptr)) {
    fail(ErrorCode::io, std::string("png encode: ") + img.message);
  }
  Bytes out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, raster.rgb.data(), 0, nullptr)) {
    fail(ErrorCode::io, std::string("png encode: ") + img.message);
  }
  out.resize(size);
  return out;
}

inline Raster decode_png(std::span<const std::uint8_t> bytes) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    fail(ErrorCode::invalid_argument, std::string("png decode: ") + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  Raster out{img.width, img.height, std::vector<std::uint8_t>(PNG_IMAGE_SIZE(img))};
  if (!png_image_finish_read(&img, nullptr, out.rgb.data(), 0, nullptr)) {
    png_image_free(&img);
    fail(ErrorCode::invalid_argument, std::string("png decode: ") + img.message);
  }
  return out;
}

inline bool is_decodable_png(std::span<const std::uint8_t> bytes) {
  try {
    decode_png(bytes);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace retell::image
