#pragma once

// Segment overlay rendering: each segment is a translucent yellow rectangle
// with a green border, drawn on a copy of the screenshot.

#include <cmath>
#include <span>
#include <stdexcept>

#include "cortex/clustering.hpp"
#include "cortex/features.hpp"
#include "cortex/image.hpp"

namespace cortex {

struct Rgba {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  double alpha = 1.0;
};

struct OverlayStyle {
  Rgba fill{255, 255, 0, 0.35};
  Rgba border{0, 128, 0, 1.0};
  int border_width = 2;
};

namespace detail {

inline std::uint8_t blend_channel(std::uint8_t under, std::uint8_t over, double alpha) {
  return static_cast<std::uint8_t>(std::lround(under * (1.0 - alpha) + over * alpha));
}

inline Rgb blend(Rgb under, const Rgba& over) {
  return {blend_channel(under.r, over.r, over.alpha), blend_channel(under.g, over.g, over.alpha),
          blend_channel(under.b, over.b, over.alpha)};
}

}  // namespace detail

/// Returns a new image; `screenshot` is left untouched.
inline Image render_overlay(const Image& screenshot, std::span<const Segment> segments,
                            const OverlayStyle& style = {}) {
  for (const Rgba* c : {&style.fill, &style.border})
    if (!(c->alpha >= 0.0 && c->alpha <= 1.0)) throw std::invalid_argument("overlay alpha outside [0,1]");
  Image out = screenshot;
  for (const auto& seg : segments) {
    const PixelBox box = clip(covering_pixels(seg.bbox), out);
    for (int y = box.y0; y < box.y1; ++y) {
      for (int x = box.x0; x < box.x1; ++x) {
        const bool on_border = x < box.x0 + style.border_width || x >= box.x1 - style.border_width ||
                               y < box.y0 + style.border_width || y >= box.y1 - style.border_width;
        out.set(x, y, detail::blend(out.at(x, y), on_border ? style.border : style.fill));
      }
    }
  }
  return out;
}

}  // namespace cortex
