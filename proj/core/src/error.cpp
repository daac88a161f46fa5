#include "mtvpar/error.hpp"

namespace mtvpar {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::EmptyTrial: return "EmptyTrial";
    case ErrorCode::BadSampleRate: return "BadSampleRate";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::BadPenalty: return "BadPenalty";
    case ErrorCode::BadGamma: return "BadGamma";
    case ErrorCode::TooLong: return "TooLong";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::ConstantTrace: return "ConstantTrace";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::ZeroWeight: return "ZeroWeight";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MissingInput: return "MissingInput";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::size_t trial,
             std::size_t frame)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code),
      trial_(trial),
      frame_(frame) {}

Error Error::with_trial(std::size_t trial) const {
  Error tagged = *this;
  tagged.trial_ = trial;
  static_cast<std::runtime_error&>(tagged) = std::runtime_error(
      "trial " + std::to_string(trial) + ": " + std::string(what()));
  return tagged;
}

}  // namespace mtvpar
