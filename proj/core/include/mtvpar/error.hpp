// error.hpp
// Structured error type shared by every mtvpar module.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mtvpar {

enum class ErrorCode {
  NonFiniteValue,
  EmptyTrial,
  BadSampleRate,
  DimensionMismatch,
  BadRange,
  BadPenalty,
  BadGamma,
  TooLong,
  NegativeRate,
  ConstantTrace,
  OutOfDomain,
  ZeroWeight,
  BadConfig,
  ParseError,
  IoError,
  MissingInput,
};

std::string_view to_string(ErrorCode code) noexcept;

// Trial and frame locations are 1-based; 0 means "not applicable".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::size_t trial = 0,
        std::size_t frame = 0);

  ErrorCode code() const noexcept { return code_; }
  std::size_t trial() const noexcept { return trial_; }
  std::size_t frame() const noexcept { return frame_; }

  // Copy of this error tagged with a trial index (used when per-trial
  // failures propagate out of multi-trial operations).
  Error with_trial(std::size_t trial) const;

 private:
  ErrorCode code_;
  std::size_t trial_;
  std::size_t frame_;
};

}  // namespace mtvpar
