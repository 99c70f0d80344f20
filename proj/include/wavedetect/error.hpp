#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wavedetect {

enum class ErrorCode {
  UnsupportedWavelet,
  EmptySignal,
  DepthExceeded,
  MalformedDecomposition,
  SignalTooShort,
  WindowTooLong,
  InvalidArgument,
  DegenerateWind,
  SolverDiverged,
  ScenarioInvalid,
  MissingClass,
  NotSeparable,
  MalformedInput,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnsupportedWavelet: return "UnsupportedWavelet";
    case ErrorCode::EmptySignal: return "EmptySignal";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::MalformedDecomposition: return "MalformedDecomposition";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DegenerateWind: return "DegenerateWind";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::ScenarioInvalid: return "ScenarioInvalid";
    case ErrorCode::MissingClass: return "MissingClass";
    case ErrorCode::NotSeparable: return "NotSeparable";
    case ErrorCode::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wavedetect
