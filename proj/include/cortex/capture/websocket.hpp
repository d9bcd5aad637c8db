#pragma once

// WebSocket transport for the DevTools protocol, on Boost.Beast.

#include <boost/asio/connect.hpp>
#include <boost/asio/io_context.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include <optional>
#include <regex>
#include <string>

#include "cortex/capture/cdp.hpp"
#include "cortex/error.hpp"

namespace cortex::capture {

struct WsEndpoint {
  std::string host;
  std::string port;
  std::string path;
};

/// Splits ws://host:port/path. Throws ProtocolError on anything else.
inline WsEndpoint parse_ws_url(const std::string& url) {
  static const std::regex pattern(R"(^ws://([^/:]+):(\d+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, pattern)) throw Error(ErrorCode::ProtocolError, "bad websocket url: " + url);
  return {m[1].str(), m[2].str(), m[3].matched ? m[3].str() : "/"};
}

class WebSocketTransport final : public Transport {
 public:
  explicit WebSocketTransport(const std::string& url) : ws_(ioc_) {
    const WsEndpoint ep = parse_ws_url(url);
    try {
      boost::asio::ip::tcp::resolver resolver(ioc_);
      boost::asio::connect(ws_.next_layer(), resolver.resolve(ep.host, ep.port));
      ws_.read_message_max(256u << 20);  // full-page screenshots are large
      ws_.handshake(ep.host + ":" + ep.port, ep.path);
    } catch (const boost::system::system_error& e) {
      throw Error(ErrorCode::ProtocolError, "connect " + url + ": " + e.what());
    }
  }

  ~WebSocketTransport() override {
    boost::system::error_code ec;
    ws_.next_layer().close(ec);
  }

  void send(const std::string& message) override {
    boost::system::error_code ec;
    ws_.text(true);
    ws_.write(boost::asio::buffer(message), ec);
    if (ec) throw Error(ErrorCode::ProtocolError, "websocket write: " + ec.message());
  }

  std::optional<std::string> receive(Millis timeout) override {
    if (!read_pending_) {
      read_pending_ = true;
      read_done_ = false;
      ws_.async_read(buffer_, [this](boost::system::error_code ec, std::size_t) {
        read_ec_ = ec;
        read_done_ = true;
      });
    }
    ioc_.restart();
    ioc_.run_for(timeout);
    if (!read_done_) return std::nullopt;  // the read stays queued for the next call
    read_pending_ = false;
    if (read_ec_) throw Error(ErrorCode::ProtocolError, "websocket read: " + read_ec_.message());
    std::string out = boost::beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    return out;
  }

 private:
  boost::asio::io_context ioc_;
  boost::beast::websocket::stream<boost::asio::ip::tcp::socket> ws_;
  boost::beast::flat_buffer buffer_;
  bool read_pending_ = false;
  bool read_done_ = false;
  boost::system::error_code read_ec_;
};

}  // namespace cortex::capture
