#include "specclip/error.hpp"

namespace specclip {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NonFinite: return "NonFinite";
    case Errc::DimensionTooLarge: return "DimensionTooLarge";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::DegenerateSpectrum: return "DegenerateSpectrum";
    case Errc::ZeroMatrix: return "ZeroMatrix";
    case Errc::NonPositiveThreshold: return "NonPositiveThreshold";
    case Errc::EmptyMatrix: return "EmptyMatrix";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::RankTooLarge: return "RankTooLarge";
    case Errc::ZeroNoise: return "ZeroNoise";
    case Errc::NonUnitVector: return "NonUnitVector";
    case Errc::DegenerateProjection: return "DegenerateProjection";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::InvalidConstants: return "InvalidConstants";
    case Errc::ThresholdBelowB: return "ThresholdBelowB";
    case Errc::ParseError: return "ParseError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace specclip
