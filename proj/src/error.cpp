#include "ddstop/error.hpp"

namespace ddstop {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::OutOfDomain: return "OutOfDomain";
    case Errc::NonFinite: return "NonFinite";
    case Errc::GridTooCoarse: return "GridTooCoarse";
    case Errc::InvalidThreshold: return "InvalidThreshold";
    case Errc::EmptyWindow: return "EmptyWindow";
    case Errc::NegativeRegret: return "NegativeRegret";
    case Errc::BadParameters: return "BadParameters";
    case Errc::DegenerateDesign: return "DegenerateDesign";
    case Errc::TooFewRecords: return "TooFewRecords";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace ddstop
