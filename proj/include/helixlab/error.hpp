#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace helixlab {

enum class ErrorCode {
  SingularMetric,
  NonSymmetricMetric,
  IrregularCurve,
  TooFewSamples,
  NonMonotoneParameter,
  DegenerateFrame,
  NotSlantHelix,
  NonOrthonormalInitialFrame,
  StepTooLarge,
  NonPositiveW,
  AxisFitFailed,
  SyntaxError,
  UnknownIdentifier,
  UnboundVariable,
  DomainError,
  EmptyGrid,
  NonFiniteValue,
  InsufficientSamples,
  InvalidArgument,
  ConfigError,
  UnknownSeries,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failures also record the byte offset of the offending token.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, const std::string& message)
      : Error(ErrorCode::SyntaxError, "at byte " + std::to_string(offset) + ": " + message),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace helixlab
