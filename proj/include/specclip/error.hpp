#pragma once

#include <stdexcept>
#include <string>

namespace specclip {

enum class Errc {
  InvalidArgument,
  ShapeMismatch,
  NonFinite,
  DimensionTooLarge,
  NoConvergence,
  DegenerateSpectrum,
  ZeroMatrix,
  NonPositiveThreshold,
  EmptyMatrix,
  InvalidSpec,
  RankTooLarge,
  ZeroNoise,
  NonUnitVector,
  DegenerateProjection,
  LengthMismatch,
  InsufficientSamples,
  QuadratureFailure,
  InvalidConstants,
  ThresholdBelowB,
  ParseError,
  IoError,
};

const char* to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace specclip
