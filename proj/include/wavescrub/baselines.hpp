#pragma once

#include <vector>

#include "wavescrub/exec.hpp"
#include "wavescrub/frame.hpp"

namespace wavescrub {

struct GaussianParams {
    double sigma = 2.0;

    int radius() const;
};

/// Normalised taps k_i ~ exp(-i^2 / 2 sigma^2), i in [-radius, radius].
std::vector<double> gaussian_kernel(const GaussianParams& p);

/// Separable blur, horizontal pass first, half-sample symmetric borders.
Frame gaussian_blur(const Frame& f, const GaussianParams& p, Exec exec = Exec::Parallel);

struct DownsampleParams {
    int factor = 8;
};

/// Replaces every pixel by the mean of its factor x factor cell (box
/// downsample followed by nearest-neighbour upsample). Cells on the right and
/// bottom edges may be smaller.
Frame downsample_anonymize(const Frame& f, const DownsampleParams& p);

struct SlicParams {
    int segments = 200;
    /// Colour is on a unit scale, so 0.1 corresponds to the usual m = 10 in CIELAB.
    double compactness = 0.1;
    int iterations = 10;
};

struct Segmentation {
    int width = 0;
    int height = 0;
    int count = 0;
    std::vector<int> labels;  // row-major, values in [0, count)
};

/// SLIC over the frame's native channels (unit scale, not CIELAB),
/// followed by connectivity enforcement.
Segmentation slic_segment(const Frame& f, const SlicParams& p, Exec exec = Exec::Parallel);

/// Fills every segment with its per-channel mean.
Frame fill_segments(const Frame& f, const Segmentation& seg);

Frame superpixel_anonymize(const Frame& f, const SlicParams& p, Exec exec = Exec::Parallel);

}  // namespace wavescrub
