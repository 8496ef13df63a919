#pragma once

#include <optional>

#include "ddstop/error.hpp"

namespace ddstop::test {

// Code of the Error thrown by f, or nullopt if it returns normally.
template <class F>
std::optional<Errc> error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace ddstop::test
