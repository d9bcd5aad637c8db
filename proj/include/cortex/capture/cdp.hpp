#pragma once

// Minimal DevTools-protocol client: JSON-RPC commands with ids, responses
// matched by id, events buffered until someone waits for them.

#include <chrono>
#include <deque>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "cortex/error.hpp"

namespace cortex::capture {

using Millis = std::chrono::milliseconds;

/// Message pipe to a DevTools endpoint. receive() returns nullopt on timeout.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const std::string& message) = 0;
  virtual std::optional<std::string> receive(Millis timeout) = 0;
};

class CdpSession {
 public:
  explicit CdpSession(std::unique_ptr<Transport> transport) : transport_(std::move(transport)) {}

  /// Sends a command and waits for its response. Throws ProtocolError on an
  /// error response or when no response arrives in time.
  nlohmann::json call(const std::string& method, nlohmann::json params = nlohmann::json::object(),
                      const std::string& session_id = {}, Millis timeout = Millis(30000)) {
    const long id = next_id_++;
    nlohmann::json msg{{"id", id}, {"method", method}, {"params", std::move(params)}};
    if (!session_id.empty()) msg["sessionId"] = session_id;
    transport_->send(msg.dump());

    const auto deadline = Clock::now() + timeout;
    while (true) {
      auto incoming = next_message(deadline);
      if (!incoming)
        throw Error(ErrorCode::ProtocolError, method + ": no response within timeout");
      if (incoming->contains("id") && (*incoming)["id"] == id) {
        if (incoming->contains("error")) {
          const auto& err = (*incoming)["error"];
          throw Error(ErrorCode::ProtocolError,
                      method + ": " + err.value("message", std::string("unknown error")));
        }
        return incoming->value("result", nlohmann::json::object());
      }
      if (incoming->contains("method")) events_.push_back(std::move(*incoming));
    }
  }

  /// Waits for an event (optionally scoped to a session). Returns its params, or
  /// nullopt if the timeout expires first.
  std::optional<nlohmann::json> wait_event(const std::string& method, const std::string& session_id,
                                           Millis timeout) {
    for (auto it = events_.begin(); it != events_.end(); ++it) {
      if (matches(*it, method, session_id)) {
        auto params = it->value("params", nlohmann::json::object());
        events_.erase(it);
        return params;
      }
    }
    const auto deadline = Clock::now() + timeout;
    while (true) {
      auto incoming = next_message(deadline);
      if (!incoming) return std::nullopt;
      if (matches(*incoming, method, session_id)) return incoming->value("params", nlohmann::json::object());
      if (incoming->contains("method")) events_.push_back(std::move(*incoming));
    }
  }

 private:
  using Clock = std::chrono::steady_clock;

  static bool matches(const nlohmann::json& msg, const std::string& method, const std::string& session_id) {
    if (msg.value("method", std::string()) != method) return false;
    return session_id.empty() || msg.value("sessionId", std::string()) == session_id;
  }

  std::optional<nlohmann::json> next_message(Clock::time_point deadline) {
    const auto now = Clock::now();
    if (now >= deadline) return std::nullopt;
    auto raw = transport_->receive(std::chrono::duration_cast<Millis>(deadline - now));
    if (!raw) return std::nullopt;
    try {
      return nlohmann::json::parse(*raw);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::ProtocolError, std::string("malformed message: ") + e.what());
    }
  }

  std::unique_ptr<Transport> transport_;
  std::deque<nlohmann::json> events_;
  long next_id_ = 1;
};

}  // namespace cortex::capture
