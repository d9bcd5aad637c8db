#pragma once

// Visual object abstraction: filters snapshot nodes down to the visible text,
// image and interactive objects that the rest of the pipeline reasons about.

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "cortex/color.hpp"
#include "cortex/error.hpp"
#include "cortex/snapshot.hpp"

namespace cortex {

enum class ObjectKind { Text, Image, Interactive };

constexpr std::string_view to_string(ObjectKind k) {
  switch (k) {
    case ObjectKind::Text: return "Text";
    case ObjectKind::Image: return "Image";
    case ObjectKind::Interactive: return "Interactive";
  }
  return "?";
}

struct VisualObject {
  int id = 0;
  ObjectKind kind = ObjectKind::Text;
  Rect box;
  std::string xpath;
  std::optional<Rgb> fg_css;  // computed style "color", when parsable
  std::size_t node_ref = 0;   // index into PageSnapshot::nodes

  friend bool operator==(const VisualObject&, const VisualObject&) = default;
};

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline bool tag_in(const RawNode& n, std::initializer_list<std::string_view> tags) {
  const std::string t = lower(n.tag);
  return std::find(tags.begin(), tags.end(), t) != tags.end();
}

inline bool has_visible_text(const std::optional<std::string>& text) {
  if (!text) return false;
  return std::any_of(text->begin(), text->end(),
                     [](unsigned char c) { return !std::isspace(c); });
}

}  // namespace detail

/// Visibility predicate: rendered, not hidden, not fully transparent, at least
/// 1x1 px, and overlapping the document.
inline bool is_visible(const RawNode& n, const PageSnapshot& s) {
  if (detail::lower(detail::trim(n.style_value("display"))) == "none") return false;
  const std::string vis = detail::lower(detail::trim(n.style_value("visibility")));
  if (vis == "hidden" || vis == "collapse") return false;
  const std::string& opacity_text = n.style_value("opacity");
  if (!detail::trim(opacity_text).empty()) {
    auto opacity = detail::parse_number(opacity_text);
    if (!opacity || *opacity <= 0.0) return false;
  }
  if (n.box.w < 1.0 || n.box.h < 1.0) return false;
  return interiors_overlap(n.box, s.document());
}

/// Non-whitespace #TEXT node.
inline bool has_text(const RawNode& n) {
  return n.kind == NodeKind::TextNode && detail::has_visible_text(n.text);
}

/// Image-bearing element: img/svg/canvas, or any element with a background image.
inline bool has_image(const RawNode& n) {
  if (n.kind != NodeKind::Element) return false;
  if (detail::tag_in(n, {"img", "svg", "canvas"})) return true;
  const auto bg = detail::lower(detail::trim(n.style_value("background-image")));
  return !bg.empty() && bg != "none";
}

/// Form controls and similar interactive elements.
inline bool interactive_predicate(const RawNode& n) {
  return n.kind == NodeKind::Element &&
         detail::tag_in(n, {"input", "select", "textarea", "button"});
}

namespace detail {

inline VisualObject make_object(const RawNode& n, std::size_t index, ObjectKind kind) {
  VisualObject o;
  o.kind = kind;
  o.box = n.box;
  o.xpath = n.xpath;
  o.fg_css = parse_css_color(n.style_value("color"));
  o.node_ref = index;
  return o;
}

/// Single classification with precedence Interactive > Image > Text.
inline std::optional<ObjectKind> classify(const RawNode& n, const PageSnapshot& s) {
  if (!is_visible(n, s)) return std::nullopt;
  if (interactive_predicate(n)) return ObjectKind::Interactive;
  if (has_image(n)) return ObjectKind::Image;
  if (has_text(n)) return ObjectKind::Text;
  return std::nullopt;
}

inline std::vector<VisualObject> extract_kind(const PageSnapshot& s, ObjectKind kind) {
  std::vector<VisualObject> out;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    if (classify(s.nodes[i], s) == kind) {
      out.push_back(make_object(s.nodes[i], i, kind));
      out.back().id = static_cast<int>(out.size()) - 1;
    }
  }
  return out;
}

}  // namespace detail

// The three per-kind sets apply the kind precedence, so they are pairwise disjoint
// and their union is exactly abstract_page's output.
inline std::vector<VisualObject> extract_text_objects(const PageSnapshot& s) {
  return detail::extract_kind(s, ObjectKind::Text);
}

inline std::vector<VisualObject> extract_image_objects(const PageSnapshot& s) {
  return detail::extract_kind(s, ObjectKind::Image);
}

inline std::vector<VisualObject> extract_interactive_objects(const PageSnapshot& s) {
  return detail::extract_kind(s, ObjectKind::Interactive);
}

/// All visual objects, ordered by (y, x, xpath) with dense ids in that order.
/// Throws EmptyPage when nothing visible remains.
inline std::vector<VisualObject> abstract_page(const PageSnapshot& s) {
  std::vector<VisualObject> out;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    if (auto kind = detail::classify(s.nodes[i], s)) out.push_back(detail::make_object(s.nodes[i], i, *kind));
  }
  if (out.empty()) throw Error(ErrorCode::EmptyPage, "no visible objects in " + s.url);
  std::sort(out.begin(), out.end(), [](const VisualObject& a, const VisualObject& b) {
    return std::tie(a.box.y, a.box.x, a.xpath) < std::tie(b.box.y, b.box.x, b.xpath);
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

}  // namespace cortex
