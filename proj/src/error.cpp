#include "wavescrub/error.hpp"

namespace wavescrub {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidColorspace: return "InvalidColorspace";
    case ErrorCode::RegionOutOfBounds: return "RegionOutOfBounds";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::OddLengthSignal: return "OddLengthSignal";
    case ErrorCode::SignalTooShort: return "SignalTooShort";
    case ErrorCode::BandLengthMismatch: return "BandLengthMismatch";
    case ErrorCode::EmptyPlane: return "EmptyPlane";
    case ErrorCode::TooManyLevels: return "TooManyLevels";
    case ErrorCode::CorruptPyramid: return "CorruptPyramid";
    case ErrorCode::PolicyLevelMismatch: return "PolicyLevelMismatch";
    case ErrorCode::InvalidDepth: return "InvalidDepth";
    case ErrorCode::InvalidGain: return "InvalidGain";
    case ErrorCode::InvalidSigma: return "InvalidSigma";
    case ErrorCode::InvalidFactor: return "InvalidFactor";
    case ErrorCode::TooManySegments: return "TooManySegments";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::FrameTooSmall: return "FrameTooSmall";
    case ErrorCode::DegenerateContrast: return "DegenerateContrast";
    case ErrorCode::OverlappingRegions: return "OverlappingRegions";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::UnsupportedMaxval: return "UnsupportedMaxval";
    case ErrorCode::BadSignature: return "BadSignature";
    case ErrorCode::HeaderParamMissing: return "HeaderParamMissing";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::FrameMarkerMissing: return "FrameMarkerMissing";
    case ErrorCode::ShortFrame: return "ShortFrame";
    case ErrorCode::SceneTooSmall: return "SceneTooSmall";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::int64_t value)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), value_(value) {}

}  // namespace wavescrub
