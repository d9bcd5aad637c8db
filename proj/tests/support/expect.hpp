#pragma once

#include <functional>
#include <optional>

#include "cortex/error.hpp"

namespace cortex::test {

/// The ErrorCode thrown by `f`, or nullopt if it returns normally.
inline std::optional<ErrorCode> error_code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace cortex::test
