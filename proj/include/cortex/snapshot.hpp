#pragma once

// Page snapshot data model: the serialized rendering facts captured from a
// browser (leaf nodes, boxes, computed styles) plus the full-page screenshot.
//
// On disk a snapshot is a directory holding `snapshot.json` and the PNG it names.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "cortex/error.hpp"
#include "cortex/geometry.hpp"
#include "cortex/image.hpp"

namespace cortex {

enum class NodeKind { TextNode, Element };

inline constexpr const char* kTextTag = "#TEXT";
inline constexpr const char* kManifestName = "snapshot.json";
inline constexpr const char* kScreenshotName = "screenshot.png";

/// Computed-style keys every node must carry.
inline const std::vector<std::string>& required_style_keys() {
  static const std::vector<std::string> keys{"color",      "background-color", "background-image",
                                             "visibility", "display",          "opacity"};
  return keys;
}

struct RawNode {
  std::string xpath;
  std::string tag;
  NodeKind kind = NodeKind::Element;
  std::optional<std::string> text;
  Rect box;
  std::map<std::string, std::string> style;
  bool is_leaf = true;

  /// Style lookup that tolerates a missing key (validated snapshots have them all).
  const std::string& style_value(const std::string& key) const {
    static const std::string none;
    auto it = style.find(key);
    return it == style.end() ? none : it->second;
  }

  friend bool operator==(const RawNode&, const RawNode&) = default;
};

struct PageSnapshot {
  std::string url;
  int viewport_w = 0;
  int viewport_h = 0;
  double device_pixel_ratio = 1.0;
  std::vector<RawNode> nodes;
  std::string screenshot_name = kScreenshotName;
  Image screenshot;
  int skipped_iframes = 0;

  /// The document rectangle, i.e. the full-page screenshot extent.
  Rect document() const {
    return {0.0, 0.0, static_cast<double>(screenshot.width()),
            static_cast<double>(screenshot.height())};
  }

  friend bool operator==(const PageSnapshot&, const PageSnapshot&) = default;
};

namespace detail {

[[noreturn]] inline void schema_error(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::SchemaViolation, field + ": " + why);
}

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key,
                                     const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) schema_error(where + "." + key, "missing");
  return obj.at(key);
}

inline std::string require_string(const nlohmann::json& obj, const char* key,
                                  const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_string()) schema_error(where + "." + key, "expected string");
  return v.get<std::string>();
}

inline double require_number(const nlohmann::json& obj, const char* key,
                             const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number()) schema_error(where + "." + key, "expected number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_error(where + "." + key, "not finite");
  return d;
}

inline int require_positive_int(const nlohmann::json& obj, const char* key,
                                const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number_integer() || v.get<long long>() <= 0)
    schema_error(where + "." + key, "expected positive integer");
  return v.get<int>();
}

inline RawNode node_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected object");
  RawNode n;
  n.xpath = require_string(j, "xpath", where);
  if (n.xpath.empty()) schema_error(where + ".xpath", "empty");
  n.tag = require_string(j, "tag", where);
  const std::string kind = require_string(j, "kind", where);
  if (kind == "TextNode") {
    n.kind = NodeKind::TextNode;
  } else if (kind == "Element") {
    n.kind = NodeKind::Element;
  } else {
    schema_error(where + ".kind", "unknown kind '" + kind + "'");
  }
  if (j.contains("text") && !j.at("text").is_null()) {
    if (!j.at("text").is_string()) schema_error(where + ".text", "expected string");
    n.text = j.at("text").get<std::string>();
  }
  const auto& box = require(j, "box", where);
  n.box = {require_number(box, "x", where + ".box"), require_number(box, "y", where + ".box"),
           require_number(box, "w", where + ".box"), require_number(box, "h", where + ".box")};
  const auto& style = require(j, "style", where);
  if (!style.is_object()) schema_error(where + ".style", "expected object");
  for (const auto& [key, value] : style.items()) {
    if (!value.is_string()) schema_error(where + ".style." + key, "expected string");
    n.style.emplace(key, value.get<std::string>());
  }
  const auto& leaf = require(j, "is_leaf", where);
  if (!leaf.is_boolean()) schema_error(where + ".is_leaf", "expected boolean");
  n.is_leaf = leaf.get<bool>();
  return n;
}

inline nlohmann::json node_to_json(const RawNode& n) {
  nlohmann::json j;
  j["xpath"] = n.xpath;
  j["tag"] = n.tag;
  j["kind"] = n.kind == NodeKind::TextNode ? "TextNode" : "Element";
  if (n.text) j["text"] = *n.text;
  j["box"] = {{"x", n.box.x}, {"y", n.box.y}, {"w", n.box.w}, {"h", n.box.h}};
  j["style"] = n.style;
  j["is_leaf"] = n.is_leaf;
  return j;
}

}  // namespace detail

/// Checks every snapshot invariant. Throws SchemaViolation or DuplicateXpath.
inline void validate(const PageSnapshot& s) {
  using detail::schema_error;
  if (s.viewport_w <= 0 || s.viewport_h <= 0) schema_error("viewport", "dimensions must be > 0");
  if (s.device_pixel_ratio != 1.0) schema_error("dpr", "must be 1.0");
  if (s.screenshot.empty()) schema_error("screenshot", "empty raster");

  const double doc_w = s.screenshot.width();
  const double doc_h = s.screenshot.height();
  std::set<std::string> seen;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) {
    const RawNode& n = s.nodes[i];
    const std::string where = "nodes[" + std::to_string(i) + "]";
    if (n.xpath.empty()) schema_error(where + ".xpath", "empty");
    if (!seen.insert(n.xpath).second)
      throw Error(ErrorCode::DuplicateXpath, n.xpath);
    if (n.kind == NodeKind::TextNode && (n.tag != kTextTag || !n.text))
      schema_error(where, "TextNode requires tag #TEXT and text");
    for (const auto& key : required_style_keys())
      if (!n.style.contains(key)) schema_error(where + ".style." + key, "missing");
    const Rect& b = n.box;
    for (double v : {b.x, b.y, b.w, b.h})
      if (!std::isfinite(v)) schema_error(where + ".box", "not finite");
    if (b.w < 0.0 || b.h < 0.0) schema_error(where + ".box", "negative size");
    if (b.x < 0.0 || b.y < 0.0) schema_error(where + ".box", "negative origin");
    if (std::ceil(b.right()) > doc_w || std::ceil(b.bottom()) > doc_h)
      schema_error(where + ".box", "extends beyond the screenshot");
  }
}

inline nlohmann::json manifest_to_json(const PageSnapshot& s) {
  nlohmann::json j;
  j["url"] = s.url;
  j["viewport"] = {{"w", s.viewport_w}, {"h", s.viewport_h}};
  j["dpr"] = s.device_pixel_ratio;
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : s.nodes) j["nodes"].push_back(detail::node_to_json(n));
  j["screenshot"] = s.screenshot_name;
  j["skipped_iframes"] = s.skipped_iframes;
  return j;
}

/// Parses the manifest fields; the screenshot raster is left empty.
inline PageSnapshot manifest_from_json(const nlohmann::json& j) {
  using detail::schema_error;
  if (!j.is_object()) schema_error("$", "expected object");
  PageSnapshot s;
  s.url = detail::require_string(j, "url", "$");
  const auto& vp = detail::require(j, "viewport", "$");
  s.viewport_w = detail::require_positive_int(vp, "w", "$.viewport");
  s.viewport_h = detail::require_positive_int(vp, "h", "$.viewport");
  s.device_pixel_ratio = detail::require_number(j, "dpr", "$");
  const auto& nodes = detail::require(j, "nodes", "$");
  if (!nodes.is_array()) schema_error("$.nodes", "expected array");
  s.nodes.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    s.nodes.push_back(detail::node_from_json(nodes[i], "nodes[" + std::to_string(i) + "]"));
  s.screenshot_name = detail::require_string(j, "screenshot", "$");
  if (s.screenshot_name.empty()) schema_error("$.screenshot", "empty");
  if (j.contains("skipped_iframes")) {
    const auto& v = j.at("skipped_iframes");
    if (!v.is_number_integer() || v.get<long long>() < 0)
      schema_error("$.skipped_iframes", "expected non-negative integer");
    s.skipped_iframes = v.get<int>();
  }
  return s;
}

inline PageSnapshot load_snapshot(const std::filesystem::path& dir) {
  const auto manifest_path = dir / kManifestName;
  std::ifstream in(manifest_path);
  if (!in) throw Error(ErrorCode::SchemaViolation, manifest_path.string() + ": cannot open");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, manifest_path.string() + ": " + e.what());
  }
  PageSnapshot s = manifest_from_json(j);
  const auto shot = dir / s.screenshot_name;
  if (!std::filesystem::is_regular_file(shot))
    throw Error(ErrorCode::MissingScreenshot, shot.string());
  try {
    s.screenshot = read_png(shot);
  } catch (const Error& e) {
    throw Error(ErrorCode::MissingScreenshot, e.what());
  }
  validate(s);
  return s;
}

inline void save_snapshot(const PageSnapshot& s, const std::filesystem::path& dir) {
  validate(s);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, dir.string() + ": " + ec.message());
  const auto manifest_path = dir / kManifestName;
  std::ofstream out(manifest_path);
  if (!out) throw Error(ErrorCode::IoFailure, manifest_path.string() + ": cannot write");
  out << manifest_to_json(s).dump(1) << '\n';
  out.close();
  if (!out) throw Error(ErrorCode::IoFailure, manifest_path.string() + ": write failed");
  write_png(s.screenshot, dir / s.screenshot_name);
}

}  // namespace cortex
