#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "wavescrub/dwt.hpp"
#include "wavescrub/exec.hpp"
#include "wavescrub/frame.hpp"

namespace wavescrub {

/// Per-(level, band) attenuation applied to a pyramid before reconstruction.
/// Gain 0 destroys a band, 1 keeps it, anything between attenuates.
struct DestructionPolicy {
    int levels = 0;
    /// gains[level - 1] = {LH, HL, HH}.
    std::vector<std::array<double, 3>> gains;
    double approx_gain = 1.0;

    double gain(int level, BandKind kind) const;
    void set_gain(int level, BandKind kind, double g);

    /// Throws InvalidGain / PolicyLevelMismatch when the table is malformed.
    void validate() const;

    static DestructionPolicy identity(int levels);
};

/// Zero gain on every band of levels 1..destroy_finest, unit gain elsewhere.
DestructionPolicy default_policy(int levels, int destroy_finest);

/// Chroma counterpart of default_policy: one level fewer destroyed.
DestructionPolicy default_chroma_policy(int levels, int destroy_finest);

/// Continuous depth: levels below floor(depth) are destroyed, the next level
/// keeps 1 - frac(depth) of its detail. Integral depths equal default_policy.
DestructionPolicy graded_policy(int levels, double depth);

enum class ColorMode { PerRgbChannel, LumaChroma };

std::string_view to_string(ColorMode m) noexcept;
ColorMode parse_color_mode(std::string_view name);

struct WtaaConfig {
    WaveletBasis basis = WaveletBasis::make(BasisId::Cdf97);
    DestructionPolicy policy;
    std::optional<DestructionPolicy> chroma_policy;
    ColorMode colorspace_mode = ColorMode::PerRgbChannel;
};

Pyramid apply_policy(const Pyramid& p, const DestructionPolicy& policy);

/// decompose -> apply_policy -> reconstruct on each channel, then clamp to [0,1].
/// In LumaChroma mode RGB input is converted to YCbCr and back; Cb/Cr use
/// `chroma_policy` when present, otherwise `policy`.
Frame anonymize_wtaa(const Frame& f, const WtaaConfig& cfg, Exec exec = Exec::Parallel);

/// Upper bound on how far (in pixels, Chebyshev) a change to one input pixel
/// can propagate through decompose/reconstruct away from image borders.
int locality_radius(BasisId basis, int levels) noexcept;

}  // namespace wavescrub
