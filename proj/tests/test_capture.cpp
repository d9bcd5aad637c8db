#include <gtest/gtest.h>

#include <openssl/evp.h>

#include <deque>
#include <fstream>
#include <thread>

#include "cortex/capture/capture.hpp"
#include "support/expect.hpp"
#include "support/synthetic.hpp"
#include "support/tempdir.hpp"

using namespace cortex;
using namespace cortex::capture;
using nlohmann::json;

namespace {

std::string base64(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> png_bytes(const Image& img) {
  test::TempDir dir;
  write_png(img, dir / "s.png");
  std::ifstream in(dir / "s.png", std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// Scripted browser endpoint answering the commands capture_with sends.
struct FakeBrowser {
  Image screenshot{200, 150, {250, 250, 250}};
  json extracted;
  std::string nav_error;
  bool fire_load = true;
  bool script_throws = false;
  bool unstable_script = false;
  std::vector<std::string> methods;
  int evaluations = 0;
};

class FakeTransport final : public Transport {
 public:
  explicit FakeTransport(FakeBrowser& b) : b_(b) {}

  void send(const std::string& message) override {
    const auto msg = json::parse(message);
    const std::string method = msg.at("method");
    b_.methods.push_back(method);
    json result = json::object();
    const std::string session = msg.value("sessionId", std::string());
    if (method == "Target.createTarget") {
      result = {{"targetId", "T1"}};
    } else if (method == "Target.attachToTarget") {
      result = {{"sessionId", "S1"}};
    } else if (method == "Page.navigate") {
      if (!b_.nav_error.empty()) result = {{"errorText", b_.nav_error}};
      if (b_.nav_error.empty() && b_.fire_load)
        queue_.push_back(json{{"method", "Page.loadEventFired"}, {"sessionId", session}, {"params", {{"timestamp", 1}}}}.dump());
    } else if (method == "Runtime.evaluate") {
      ++b_.evaluations;
      if (b_.script_throws) {
        result = {{"result", {{"type", "object"}}},
                  {"exceptionDetails", {{"text", "Uncaught"}, {"exception", {{"description", "ReferenceError: boom"}}}}}};
      } else {
        json value = b_.extracted;
        if (b_.unstable_script && b_.evaluations > 1) value = json::array();
        result = {{"result", {{"type", "string"}, {"value", value.dump()}}}};
      }
    } else if (method == "Page.getLayoutMetrics") {
      result = {{"cssContentSize", {{"x", 0}, {"y", 0}, {"width", 200}, {"height", 150}}}};
    } else if (method == "Page.captureScreenshot") {
      result = {{"data", base64(png_bytes(b_.screenshot))}};
    }
    // an unrelated event first, to exercise buffering
    queue_.push_back(json{{"method", "Network.dataReceived"}, {"params", json::object()}}.dump());
    queue_.push_back(json{{"id", msg.at("id")}, {"result", result}}.dump());
  }

  std::optional<std::string> receive(Millis) override {
    if (queue_.empty()) return std::nullopt;
    auto m = queue_.front();
    queue_.pop_front();
    return m;
  }

 private:
  FakeBrowser& b_;
  std::deque<std::string> queue_;
};

json two_nodes() {
  json text = cortex::detail::node_to_json(test::text_node("/html/body/p/text()[1]", "Hello", {10, 10, 50, 14}));
  json img = cortex::detail::node_to_json(test::element_node("/html/body/img", "IMG", {10, 40, 300, 80}));
  return json::array({text, img});
}

CaptureConfig config() {
  CaptureConfig cfg;
  cfg.url = "http://example.test/";
  cfg.viewport_w = 200;
  cfg.viewport_h = 150;
  cfg.nav_timeout_s = 0.5;
  cfg.settle_delay_s = 0.0;
  cfg.extractor_script = "extract()";
  return cfg;
}

PageSnapshot run(FakeBrowser& b, CaptureConfig cfg = config()) {
  CdpSession cdp(std::make_unique<FakeTransport>(b));
  return capture_with(cdp, cfg);
}

}  // namespace

TEST(Capture, HappyPathAssemblesValidSnapshot) {
  FakeBrowser b;
  b.extracted = two_nodes();
  const auto s = run(b);
  EXPECT_EQ(s.url, "http://example.test/");
  EXPECT_EQ(s.viewport_w, 200);
  EXPECT_EQ(s.device_pixel_ratio, 1.0);
  EXPECT_TRUE(s.screenshot == b.screenshot);
  ASSERT_EQ(s.nodes.size(), 2u);
  EXPECT_EQ(s.nodes[0].text, "Hello");
  // the image overflowing the document is clipped to it
  EXPECT_EQ(s.nodes[1].box, (Rect{10, 40, 190, 80}));
  EXPECT_NO_THROW(validate(s));
  EXPECT_EQ(b.methods.front(), "Target.createTarget");
  EXPECT_EQ(b.methods.back(), "Target.closeTarget");
}

TEST(Capture, ObjectFormCarriesSkippedIframes) {
  FakeBrowser b;
  b.extracted = {{"nodes", two_nodes()}, {"skipped_iframes", 2}};
  EXPECT_EQ(run(b).skipped_iframes, 2);
}

TEST(Capture, NavigationErrorIsNavigationTimeout) {
  FakeBrowser b;
  b.extracted = two_nodes();
  b.nav_error = "net::ERR_NAME_NOT_RESOLVED";
  EXPECT_EQ(test::error_code_of([&] { run(b); }), ErrorCode::NavigationTimeout);
}

TEST(Capture, MissingLoadEventIsNavigationTimeout) {
  FakeBrowser b;
  b.extracted = two_nodes();
  b.fire_load = false;
  EXPECT_EQ(test::error_code_of([&] { run(b); }), ErrorCode::NavigationTimeout);
}

TEST(Capture, ScriptExceptionIsExtractionScriptError) {
  FakeBrowser b;
  b.script_throws = true;
  try {
    run(b);
    FAIL() << "expected a throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ExtractionScriptError);
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
  }
}

TEST(Capture, MalformedNodesAreRejected) {
  FakeBrowser b;
  b.extracted = json::array({{{"xpath", "/a"}}});
  EXPECT_TRUE(test::error_code_of([&] { run(b); }).has_value());
  b.extracted = {{"count", 3}};
  EXPECT_EQ(test::error_code_of([&] { run(b); }), ErrorCode::ExtractionScriptError);
}

TEST(Capture, IdempotenceCheckComparesTwoRuns) {
  FakeBrowser stable;
  stable.extracted = two_nodes();
  auto cfg = config();
  cfg.verify_idempotent = true;
  EXPECT_NO_THROW(run(stable, cfg));
  EXPECT_EQ(stable.evaluations, 2);
  FakeBrowser unstable;
  unstable.extracted = two_nodes();
  unstable.unstable_script = true;
  EXPECT_EQ(test::error_code_of([&] { run(unstable, cfg); }), ErrorCode::ExtractionScriptError);
}

TEST(Capture, ConfigValidation) {
  auto cfg = config();
  cfg.url.clear();
  EXPECT_THROW(capture::validate(cfg), std::invalid_argument);
  cfg = config();
  cfg.viewport_w = 0;
  EXPECT_THROW(capture::validate(cfg), std::invalid_argument);
  cfg = config();
  cfg.extractor_script.clear();
  EXPECT_THROW(capture::validate(cfg), std::invalid_argument);
}

TEST(Base64, DecodesWithPadding) {
  const std::string s = "hello!?";
  for (std::size_t n = 0; n <= s.size(); ++n) {
    const std::vector<std::uint8_t> bytes(s.begin(), s.begin() + static_cast<long>(n));
    EXPECT_EQ(base64_decode(base64(bytes)), bytes);
  }
  EXPECT_EQ(test::error_code_of([] { base64_decode("abc"); }), ErrorCode::ProtocolError);
}

TEST(WsUrl, Parse) {
  const auto ep = parse_ws_url("ws://127.0.0.1:9222/devtools/browser/abc");
  EXPECT_EQ(ep.host, "127.0.0.1");
  EXPECT_EQ(ep.port, "9222");
  EXPECT_EQ(ep.path, "/devtools/browser/abc");
  EXPECT_EQ(parse_ws_url("ws://localhost:1").path, "/");
  EXPECT_EQ(test::error_code_of([] { parse_ws_url("http://x:1/"); }), ErrorCode::ProtocolError);
}

TEST(WebSocketTransport, RoundTripAgainstLoopbackServer) {
  namespace net = boost::asio;
  namespace ws = boost::beast::websocket;
  net::io_context ioc;
  net::ip::tcp::acceptor acceptor(ioc, {net::ip::make_address("127.0.0.1"), 0});
  const auto port = acceptor.local_endpoint().port();
  std::thread server([&] {
    ws::stream<net::ip::tcp::socket> stream(acceptor.accept());
    stream.accept();
    boost::beast::flat_buffer buf;
    stream.read(buf);
    const auto req = json::parse(boost::beast::buffers_to_string(buf.data()));
    stream.text(true);
    stream.write(net::buffer(json{{"method", "Some.event"}, {"params", json::object()}}.dump()));
    stream.write(net::buffer(json{{"id", req.at("id")}, {"result", {{"product", "Fake/1.0"}}}}.dump()));
    buf.consume(buf.size());
    boost::system::error_code ec;
    stream.read(buf, ec);  // until the client closes
  });
  {
    CdpSession cdp(std::make_unique<WebSocketTransport>("ws://127.0.0.1:" + std::to_string(port) + "/devtools"));
    const auto r = cdp.call("Browser.getVersion", json::object(), {}, Millis(5000));
    EXPECT_EQ(r.at("product"), "Fake/1.0");
    EXPECT_TRUE(cdp.wait_event("Some.event", {}, Millis(10)).has_value());
    EXPECT_FALSE(cdp.wait_event("Never.sent", {}, Millis(50)).has_value());
  }
  server.join();
}

TEST(WebSocketTransport, ConnectFailureIsProtocolError) {
  namespace net = boost::asio;
  net::io_context ioc;
  unsigned short port;
  {
    net::ip::tcp::acceptor probe(ioc, {net::ip::make_address("127.0.0.1"), 0});
    port = probe.local_endpoint().port();
  }
  EXPECT_EQ(test::error_code_of([&] { WebSocketTransport t("ws://127.0.0.1:" + std::to_string(port) + "/"); }),
            ErrorCode::ProtocolError);
}

TEST(Browser, UnlaunchableBinaryIsProtocolError) {
  EXPECT_EQ(test::error_code_of([] { BrowserProcess p("/nonexistent/chromium", std::chrono::seconds(2)); }),
            ErrorCode::ProtocolError);
  EXPECT_EQ(test::error_code_of([] { BrowserProcess p("/bin/false", std::chrono::seconds(5)); }),
            ErrorCode::ProtocolError);
}
