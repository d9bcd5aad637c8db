#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cortex {

enum class ErrorCode {
  MissingScreenshot,
  SchemaViolation,
  DuplicateXpath,
  IoFailure,
  EmptyPage,
  EmptyRegion,
  EmptyAdjacency,
  InsufficientSamples,
  NavigationTimeout,
  ExtractionScriptError,
  ProtocolError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingScreenshot: return "MissingScreenshot";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::DuplicateXpath: return "DuplicateXpath";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::EmptyPage: return "EmptyPage";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::EmptyAdjacency: return "EmptyAdjacency";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::NavigationTimeout: return "NavigationTimeout";
    case ErrorCode::ExtractionScriptError: return "ExtractionScriptError";
    case ErrorCode::ProtocolError: return "ProtocolError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cortex
