#pragma once

// Per-line primitives shared by the serial and OpenMP kernels so that both
// evaluate identical floating-point expressions.

#include <algorithm>
#include <cmath>
#include <span>

#include "wavescrub/kernels.hpp"

namespace wavescrub::kernels::detail {

inline void convolve_line(std::span<const double> in, std::span<const double> taps, std::span<double> out) {
    const int n = static_cast<int>(in.size());
    const int radius = static_cast<int>(taps.size() / 2);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        if (i >= radius && i + radius < n) {
            const double* src = in.data() + (i - radius);
            for (std::size_t k = 0; k < taps.size(); ++k) acc += taps[k] * src[k];
        } else {
            for (int k = -radius; k <= radius; ++k) acc += taps[static_cast<std::size_t>(k + radius)] * in[mirror_index(i + k, n)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
}

struct Window {
    int x0, x1, y0, y1;  // inclusive
};

inline Window search_window(const ClusterCenter& c, double step, int width, int height) noexcept {
    return {std::max(0, static_cast<int>(std::floor(c.x - step))),
            std::min(width - 1, static_cast<int>(std::ceil(c.x + step))),
            std::max(0, static_cast<int>(std::floor(c.y - step))),
            std::min(height - 1, static_cast<int>(std::ceil(c.y + step)))};
}

/// Squared SLIC distance: d_color^2 + (d_xy / S)^2 * m^2.
inline double slic_distance2(const Frame& f, std::size_t idx, int x, int y, const ClusterCenter& c,
                             double spatial_weight) noexcept {
    double dc = 0.0;
    for (int ch = 0; ch < f.channels(); ++ch) {
        const double diff = f.channel(ch).samples()[idx] - c.color[ch];
        dc += diff * diff;
    }
    const double dx = x - c.x;
    const double dy = y - c.y;
    return dc + (dx * dx + dy * dy) * spatial_weight;
}

inline double spatial_weight(SlicGeometry g) noexcept {
    return (g.compactness * g.compactness) / (g.step * g.step);
}

}  // namespace wavescrub::kernels::detail
