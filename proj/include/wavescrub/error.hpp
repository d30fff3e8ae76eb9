#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wavescrub {

enum class ErrorCode {
    // pixel_core
    InvalidColorspace,
    RegionOutOfBounds,
    DimMismatch,
    // dwt
    OddLengthSignal,
    SignalTooShort,
    BandLengthMismatch,
    EmptyPlane,
    TooManyLevels,
    CorruptPyramid,
    // wtaa
    PolicyLevelMismatch,
    InvalidDepth,
    InvalidGain,
    // baselines
    InvalidSigma,
    InvalidFactor,
    TooManySegments,
    InvalidParameter,
    // metrics
    FrameTooSmall,
    DegenerateContrast,
    OverlappingRegions,
    // video_io
    BadMagic,
    MalformedHeader,
    TruncatedPayload,
    UnsupportedMaxval,
    BadSignature,
    HeaderParamMissing,
    UnsupportedFormat,
    FrameMarkerMissing,
    ShortFrame,
    // cli
    SceneTooSmall,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Typed failure raised by every module. `value()` carries the one integer
/// some codes need (TooManyLevels: max allowed levels; FrameMarkerMissing:
/// frame index; HeaderParamMissing: the missing parameter letter).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::int64_t value = -1);

    ErrorCode code() const noexcept { return code_; }
    std::int64_t value() const noexcept { return value_; }

private:
    ErrorCode code_;
    std::int64_t value_;
};

}  // namespace wavescrub
