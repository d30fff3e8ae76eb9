#pragma once

#include <cstdint>

#include "wavescrub/frame.hpp"
#include "wavescrub/metrics.hpp"

namespace wavescrub {

/// Synthetic stand-in for a scene with one figure close to the camera and
/// the same figure far away: mid-gray background, a large and a small
/// rectangle, both filled with 2-px vertical stripes.
struct SceneParams {
    int width = 256;
    int height = 256;
    /// Luma step between either figure's mean and the background.
    double figure_contrast = 0.3;
    /// Stripes alternate mean +/- this amplitude in luma.
    double stripe_amplitude = 0.1;
    /// Optional uniform noise in [-noise, noise] added to every RGB sample.
    double noise = 0.0;
    std::uint64_t seed = 1;
};

struct Scene {
    Frame frame;  // RGB
    NamedRegions regions;  // near_figure, far_figure, background
};

inline constexpr int kNearFigureWidth = 64;
inline constexpr int kNearFigureHeight = 96;
inline constexpr int kFarFigureWidth = 8;
inline constexpr int kFarFigureHeight = 12;

/// Throws SceneTooSmall unless both dimensions are even and >= 128.
Scene make_near_far_scene(const SceneParams& p = {});

}  // namespace wavescrub
