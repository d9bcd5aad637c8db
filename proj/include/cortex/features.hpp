#pragma once

// Feature vectors: computed box geometry plus foreground/background colors.
// Background always comes from the screenshot (the rendered pixels); foreground
// comes from the computed style for text and form controls, and from the
// screenshot interior for images.

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "cortex/abstraction.hpp"
#include "cortex/color.hpp"
#include "cortex/error.hpp"
#include "cortex/image.hpp"

namespace cortex {

struct FeatureVector {
  int object_id = 0;
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  LabColor fg;
  LabColor bg;

  Rect box() const { return {x, y, w, h}; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Ring thickness, in pixels, of the region sampled around an object for its background.
inline constexpr int kBackgroundRingPx = 2;

/// Integer pixel bounds [x0,x1) x [y0,y1).
struct PixelBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  bool empty() const { return x1 <= x0 || y1 <= y0; }
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

/// Pixels touched by a rectangle: columns floor(left) .. ceil(right)-1, same for rows.
inline PixelBox covering_pixels(const Rect& r) {
  return {static_cast<int>(std::floor(r.left())), static_cast<int>(std::floor(r.top())),
          static_cast<int>(std::ceil(r.right())), static_cast<int>(std::ceil(r.bottom()))};
}

inline PixelBox clip(const PixelBox& b, const Image& img) {
  return {std::max(b.x0, 0), std::max(b.y0, 0), std::min(b.x1, img.width()),
          std::min(b.y1, img.height())};
}

/// Accumulates pixels into 32-level-per-channel buckets and reports the mean
/// color of the most populated bucket (lowest bucket index on ties).
class ColorModeAccumulator {
 public:
  void add(Rgb c) {
    const std::uint32_t key = (static_cast<std::uint32_t>(c.r >> 3) << 10) |
                              (static_cast<std::uint32_t>(c.g >> 3) << 5) |
                              static_cast<std::uint32_t>(c.b >> 3);
    Bucket& b = buckets_[key];
    ++b.count;
    b.sum_r += c.r;
    b.sum_g += c.g;
    b.sum_b += c.b;
    ++total_;
  }

  std::size_t size() const { return total_; }

  std::optional<Rgb> mode() const {
    if (total_ == 0) return std::nullopt;
    std::uint32_t best_key = 0;
    const Bucket* best = nullptr;
    for (const auto& [key, bucket] : buckets_) {
      if (!best || bucket.count > best->count || (bucket.count == best->count && key < best_key)) {
        best = &bucket;
        best_key = key;
      }
    }
    auto mean = [&](std::uint64_t sum) {
      return static_cast<std::uint8_t>((sum + best->count / 2) / best->count);
    };
    return Rgb{mean(best->sum_r), mean(best->sum_g), mean(best->sum_b)};
  }

 private:
  struct Bucket {
    std::uint64_t count = 0;
    std::uint64_t sum_r = 0;
    std::uint64_t sum_g = 0;
    std::uint64_t sum_b = 0;
  };
  std::unordered_map<std::uint32_t, Bucket> buckets_;
  std::size_t total_ = 0;
};

/// Quantized color mode over the pixels of `r` inside the image.
inline Rgb region_color_mode(const Image& img, const Rect& r) {
  const PixelBox box = clip(covering_pixels(r), img);
  ColorModeAccumulator acc;
  for (int y = box.y0; y < box.y1; ++y)
    for (int x = box.x0; x < box.x1; ++x) acc.add(img.at(x, y));
  auto m = acc.mode();
  if (!m) throw Error(ErrorCode::EmptyRegion, "region has no pixels inside the image");
  return *m;
}

/// Quantized color mode over the ring of pixels within `thickness` of `r`'s
/// covering pixels, excluding those pixels themselves.
inline Rgb ring_color_mode(const Image& img, const Rect& r, int thickness = kBackgroundRingPx) {
  const PixelBox inner = covering_pixels(r);
  const PixelBox outer = clip({inner.x0 - thickness, inner.y0 - thickness, inner.x1 + thickness,
                               inner.y1 + thickness}, img);
  ColorModeAccumulator acc;
  for (int y = outer.y0; y < outer.y1; ++y)
    for (int x = outer.x0; x < outer.x1; ++x)
      if (!inner.contains(x, y)) acc.add(img.at(x, y));
  auto m = acc.mode();
  if (!m) throw Error(ErrorCode::EmptyRegion, "ring has no pixels inside the image");
  return *m;
}

inline Rgb page_background(const Image& img) {
  return region_color_mode(img, {0.0, 0.0, static_cast<double>(img.width()),
                                 static_cast<double>(img.height())});
}

inline LabColor background_color(const VisualObject& o, const Image& img) {
  try {
    return srgb_to_lab(ring_color_mode(img, o.box));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyRegion) throw;
    return srgb_to_lab(page_background(img));
  }
}

inline LabColor foreground_color(const VisualObject& o, const Image& img) {
  if (o.kind != ObjectKind::Image && o.fg_css) return srgb_to_lab(*o.fg_css);
  return srgb_to_lab(region_color_mode(img, o.box));
}

/// Index-aligned with `objects`.
inline std::vector<FeatureVector> build_features(const std::vector<VisualObject>& objects,
                                                 const Image& img) {
  std::vector<FeatureVector> out;
  out.reserve(objects.size());
  for (const auto& o : objects) {
    FeatureVector f;
    f.object_id = o.id;
    f.x = o.box.x;
    f.y = o.box.y;
    f.w = o.box.w;
    f.h = o.box.h;
    f.fg = foreground_color(o, img);
    f.bg = background_color(o, img);
    out.push_back(f);
  }
  return out;
}

}  // namespace cortex
