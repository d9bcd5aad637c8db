#pragma once

// Page capture: navigate, let the page settle, run the in-page node
// extractor, take a full-page screenshot at device pixel ratio 1, and
// assemble a validated PageSnapshot.

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cortex/capture/browser.hpp"
#include "cortex/capture/cdp.hpp"
#include "cortex/capture/websocket.hpp"
#include "cortex/error.hpp"
#include "cortex/snapshot.hpp"

namespace cortex::capture {

struct CaptureConfig {
  std::string url;
  int viewport_w = 1366;
  int viewport_h = 768;
  double nav_timeout_s = 30.0;
  double settle_delay_s = 2.0;
  std::string extractor_script;  // JavaScript expression evaluating to the node list (JSON string or value)
  std::string browser;           // optional explicit browser binary
  bool verify_idempotent = false;
};

inline void validate(const CaptureConfig& cfg) {
  if (cfg.url.empty()) throw std::invalid_argument("capture: url is empty");
  if (cfg.viewport_w <= 0 || cfg.viewport_h <= 0) throw std::invalid_argument("capture: viewport must be > 0");
  if (!(cfg.nav_timeout_s > 0.0)) throw std::invalid_argument("capture: timeout must be > 0");
  if (!(cfg.settle_delay_s >= 0.0)) throw std::invalid_argument("capture: settle delay must be >= 0");
  if (cfg.extractor_script.empty()) throw std::invalid_argument("capture: no extractor script");
}

inline std::vector<std::uint8_t> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw Error(ErrorCode::ProtocolError, "base64 payload length not a multiple of 4");
  std::vector<std::uint8_t> out(text.size() / 4 * 3);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw Error(ErrorCode::ProtocolError, "invalid base64 payload");
  std::size_t padding = 0;
  if (!text.empty() && text.back() == '=') ++padding;
  if (text.size() > 1 && text[text.size() - 2] == '=') ++padding;
  out.resize(static_cast<std::size_t>(n) - padding);
  return out;
}

namespace detail {

inline std::string exception_text(const nlohmann::json& details) {
  if (details.contains("exception")) {
    const auto& ex = details["exception"];
    if (ex.contains("description") && ex["description"].is_string()) return ex["description"].get<std::string>();
    if (ex.contains("value") && ex["value"].is_string()) return ex["value"].get<std::string>();
  }
  return details.value("text", std::string("script threw"));
}

inline nlohmann::json run_extractor(CdpSession& cdp, const std::string& session, const CaptureConfig& cfg,
                                    Millis timeout) {
  const auto result = cdp.call("Runtime.evaluate",
                               {{"expression", cfg.extractor_script},
                                {"returnByValue", true},
                                {"awaitPromise", true}},
                               session, timeout);
  if (result.contains("exceptionDetails"))
    throw Error(ErrorCode::ExtractionScriptError, exception_text(result["exceptionDetails"]));
  const auto value = result.value("result", nlohmann::json::object()).value("value", nlohmann::json());
  try {
    return value.is_string() ? nlohmann::json::parse(value.get<std::string>()) : value;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ExtractionScriptError, std::string("extractor returned malformed JSON: ") + e.what());
  }
}

/// Clips a raw box to the document. Boxes entirely outside collapse to an empty
/// box at the nearest document edge (such nodes are invisible anyway).
inline Rect clip_to_document(const Rect& box, double doc_w, double doc_h) {
  const double l = std::clamp(box.left(), 0.0, doc_w);
  const double t = std::clamp(box.top(), 0.0, doc_h);
  const double r = std::clamp(box.right(), l, doc_w);
  const double b = std::clamp(box.bottom(), t, doc_h);
  return Rect::from_edges(l, t, r, b);
}

}  // namespace detail

/// Parses the extractor output: either the node array itself or
/// {nodes: [...], skipped_iframes: n}. Node boxes are clipped to the document.
inline void apply_extraction(PageSnapshot& s, const nlohmann::json& extracted) {
  const nlohmann::json* nodes = &extracted;
  if (extracted.is_object()) {
    if (!extracted.contains("nodes"))
      throw Error(ErrorCode::ExtractionScriptError, "extractor result has no nodes");
    nodes = &extracted["nodes"];
    if (extracted.contains("skipped_iframes") && extracted["skipped_iframes"].is_number_integer())
      s.skipped_iframes = extracted["skipped_iframes"].get<int>();
  }
  if (!nodes->is_array()) throw Error(ErrorCode::ExtractionScriptError, "extractor result is not a list");
  const double doc_w = s.screenshot.width();
  const double doc_h = s.screenshot.height();
  s.nodes.clear();
  for (std::size_t i = 0; i < nodes->size(); ++i) {
    RawNode n = cortex::detail::node_from_json((*nodes)[i], "nodes[" + std::to_string(i) + "]");
    n.box = detail::clip_to_document(n.box, doc_w, doc_h);
    s.nodes.push_back(std::move(n));
  }
}

/// Runs a capture over an established DevTools connection to a browser endpoint.
inline PageSnapshot capture_with(CdpSession& cdp, const CaptureConfig& cfg) {
  validate(cfg);
  const auto timeout = Millis(static_cast<long>(cfg.nav_timeout_s * 1000.0));

  const auto target = cdp.call("Target.createTarget", {{"url", "about:blank"}}, {}, timeout);
  const std::string target_id = target.value("targetId", std::string());
  const auto attached =
      cdp.call("Target.attachToTarget", {{"targetId", target_id}, {"flatten", true}}, {}, timeout);
  const std::string session = attached.value("sessionId", std::string());
  if (session.empty()) throw Error(ErrorCode::ProtocolError, "attachToTarget returned no session");

  cdp.call("Page.enable", nlohmann::json::object(), session, timeout);
  cdp.call("Emulation.setDeviceMetricsOverride",
           {{"width", cfg.viewport_w}, {"height", cfg.viewport_h}, {"deviceScaleFactor", 1}, {"mobile", false}},
           session, timeout);

  const auto nav = cdp.call("Page.navigate", {{"url", cfg.url}}, session, timeout);
  if (nav.contains("errorText") && nav["errorText"].is_string() && !nav["errorText"].get<std::string>().empty())
    throw Error(ErrorCode::NavigationTimeout, cfg.url + ": " + nav["errorText"].get<std::string>());
  if (!cdp.wait_event("Page.loadEventFired", session, timeout))
    throw Error(ErrorCode::NavigationTimeout, cfg.url + ": load event not fired in time");
  std::this_thread::sleep_for(std::chrono::duration<double>(cfg.settle_delay_s));

  const nlohmann::json extracted = detail::run_extractor(cdp, session, cfg, timeout);
  if (cfg.verify_idempotent && detail::run_extractor(cdp, session, cfg, timeout) != extracted)
    throw Error(ErrorCode::ExtractionScriptError, "extractor output changed between two runs");

  const auto metrics = cdp.call("Page.getLayoutMetrics", nlohmann::json::object(), session, timeout);
  const auto& size = metrics.contains("cssContentSize") ? metrics["cssContentSize"] : metrics.value("contentSize", nlohmann::json::object());
  const double doc_w = std::max<double>(std::ceil(size.value("width", 0.0)), cfg.viewport_w);
  const double doc_h = std::max<double>(std::ceil(size.value("height", 0.0)), cfg.viewport_h);

  const auto shot = cdp.call("Page.captureScreenshot",
                             {{"format", "png"},
                              {"captureBeyondViewport", true},
                              {"fromSurface", true},
                              {"clip", {{"x", 0}, {"y", 0}, {"width", doc_w}, {"height", doc_h}, {"scale", 1}}}},
                             session, timeout);
  if (!shot.contains("data") || !shot["data"].is_string())
    throw Error(ErrorCode::ProtocolError, "captureScreenshot returned no data");

  PageSnapshot s;
  s.url = cfg.url;
  s.viewport_w = cfg.viewport_w;
  s.viewport_h = cfg.viewport_h;
  s.device_pixel_ratio = 1.0;
  s.screenshot = decode_png(base64_decode(shot["data"].get<std::string>()));
  apply_extraction(s, extracted);

  try {
    cdp.call("Target.closeTarget", {{"targetId", target_id}}, {}, timeout);
  } catch (const Error&) {
    // best effort
  }
  cortex::validate(s);
  return s;
}

/// Launches a browser, captures `cfg.url`, and writes the snapshot directory.
inline PageSnapshot capture(const CaptureConfig& cfg, const std::filesystem::path& out) {
  validate(cfg);
  BrowserProcess browser(find_browser(cfg.browser), std::chrono::seconds(30));
  CdpSession cdp(std::make_unique<WebSocketTransport>(browser.websocket_url()));
  PageSnapshot s = capture_with(cdp, cfg);
  save_snapshot(s, out);
  return s;
}

}  // namespace cortex::capture
