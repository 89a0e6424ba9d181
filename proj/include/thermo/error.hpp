#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace thermo {

enum class ErrorCode {
  MalformedRow,
  NonMonotonicTime,
  EmptyTrace,
  MissingMeta,
  InvalidMeta,
  InvalidSample,
  InvalidParams,
  DegenerateInput,
  NoConvergence,
  InitFailure,
  LengthMismatch,
  ZeroMeasurement,
  EmptyGroup,
  AllTies,
  InvalidCores,
  InvalidFreq,
  InsufficientSpan,
  SingularFit,
  ZeroSpread,
  InvalidModel,
  InvalidTime,
  ZeroDenominator,
};

std::string_view to_string(ErrorCode code);

// Carries a machine-readable code plus an optional position: the 1-based
// line for parse errors, the 0-based sample index for series errors.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<std::size_t> where = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> where() const noexcept { return where_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> where_;
};

}  // namespace thermo
