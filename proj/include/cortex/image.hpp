#pragma once

// 8-bit RGB raster plus PNG load/save via the libpng simplified API.

#include <png.h>

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "cortex/error.hpp"

namespace cortex {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgb fill = {255, 255, 255})
      : width_(width), height_(height),
        pixels_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3) {
    for (std::size_t i = 0; i < pixels_.size(); i += 3) {
      pixels_[i] = fill.r;
      pixels_[i + 1] = fill.g;
      pixels_[i + 2] = fill.b;
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ <= 0 || height_ <= 0; }

  Rgb at(int x, int y) const {
    const std::size_t i = offset(x, y);
    return {pixels_[i], pixels_[i + 1], pixels_[i + 2]};
  }

  void set(int x, int y, Rgb c) {
    const std::size_t i = offset(x, y);
    pixels_[i] = c.r;
    pixels_[i + 1] = c.g;
    pixels_[i + 2] = c.b;
  }

  /// Fills the pixel rectangle [x0,x1) x [y0,y1), clipped to the raster.
  void fill(int x0, int y0, int x1, int y1, Rgb c) {
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, width_);
    y1 = std::min(y1, height_);
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) set(x, y, c);
  }

  const std::vector<std::uint8_t>& data() const { return pixels_; }
  std::vector<std::uint8_t>& data() { return pixels_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

namespace detail {

inline Image finish_png_read(png_image& png, const std::string& source) {
  png.format = PNG_FORMAT_RGB;
  Image img(static_cast<int>(png.width), static_cast<int>(png.height));
  if (png_image_finish_read(&png, nullptr, img.data().data(), 0, nullptr) == 0) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw Error(ErrorCode::IoFailure, "cannot decode PNG " + source + ": " + msg);
  }
  return img;
}

}  // namespace detail

inline Image read_png(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_file(&png, path.c_str()) == 0) {
    throw Error(ErrorCode::IoFailure, "cannot read PNG " + path.string() + ": " + png.message);
  }
  return detail::finish_png_read(png, path.string());
}

inline Image decode_png(const std::vector<std::uint8_t>& bytes) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (png_image_begin_read_from_memory(&png, bytes.data(), bytes.size()) == 0) {
    throw Error(ErrorCode::IoFailure, std::string("cannot decode PNG buffer: ") + png.message);
  }
  return detail::finish_png_read(png, "buffer");
}

inline void write_png(const Image& img, const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = PNG_FORMAT_RGB;
  if (png_image_write_to_file(&png, path.c_str(), 0, img.data().data(), 0, nullptr) == 0) {
    throw Error(ErrorCode::IoFailure, "cannot write PNG " + path.string() + ": " + png.message);
  }
}

}  // namespace cortex
