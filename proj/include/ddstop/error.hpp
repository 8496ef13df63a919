#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddstop {

enum class Errc {
  OutOfRange,
  OutOfDomain,
  NonFinite,
  GridTooCoarse,
  InvalidThreshold,
  EmptyWindow,
  NegativeRegret,
  BadParameters,
  DegenerateDesign,
  TooFewRecords,
  EmptyInput,
  ConfigError,
};

std::string_view to_string(Errc code) noexcept;

/// Single exception type for the library. `key()` names the offending
/// config key for ConfigError and is empty otherwise.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::string key = {})
      : std::runtime_error(message), code_(code), key_(std::move(key)) {}

  Errc code() const noexcept { return code_; }
  const std::string& key() const noexcept { return key_; }

 private:
  Errc code_;
  std::string key_;
};

#define DDSTOP_REQUIRE(cond, code, msg)        \
  do {                                         \
    if (!(cond)) throw ::ddstop::Error((code), (msg)); \
  } while (0)

}  // namespace ddstop
