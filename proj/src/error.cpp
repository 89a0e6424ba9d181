#include "thermo/error.hpp"

namespace thermo {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::MissingMeta: return "MissingMeta";
    case ErrorCode::InvalidMeta: return "InvalidMeta";
    case ErrorCode::InvalidSample: return "InvalidSample";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InitFailure: return "InitFailure";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroMeasurement: return "ZeroMeasurement";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::AllTies: return "AllTies";
    case ErrorCode::InvalidCores: return "InvalidCores";
    case ErrorCode::InvalidFreq: return "InvalidFreq";
    case ErrorCode::InsufficientSpan: return "InsufficientSpan";
    case ErrorCode::SingularFit: return "SingularFit";
    case ErrorCode::ZeroSpread: return "ZeroSpread";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::InvalidTime: return "InvalidTime";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> where)
    : std::runtime_error(message), code_(code), where_(where) {}

}  // namespace thermo
