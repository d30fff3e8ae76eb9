#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kernels_detail.hpp"

namespace wavescrub::kernels::omp {

namespace {

// Columns are gathered in strips so each input row is read contiguously.
constexpr int kStrip = 16;

template <typename Fn>
void for_each_column_strip(int width, int height, Fn&& fn) {
    const int strips = (width + kStrip - 1) / kStrip;
#pragma omp parallel
    {
        std::vector<double> buffer(static_cast<std::size_t>(kStrip) * height);
#pragma omp for schedule(static)
        for (int s = 0; s < strips; ++s) {
            const int x0 = s * kStrip;
            const int n = std::min(kStrip, width - x0);
            fn(x0, n, buffer);
        }
    }
}

}  // namespace

void dwt_rows_forward(const Plane& in, const WaveletBasis& basis, Plane& lo, Plane& hi) {
    const int half = in.width() / 2;
    lo = Plane(half, in.height());
    hi = Plane(half, in.height());
#pragma omp parallel for schedule(static)
    for (int y = 0; y < in.height(); ++y) forward_line(in.row(y), basis, lo.row(y), hi.row(y));
}

void dwt_cols_forward(const Plane& in, const WaveletBasis& basis, Plane& lo, Plane& hi) {
    const int h = in.height();
    const int half = h / 2;
    lo = Plane(in.width(), half);
    hi = Plane(in.width(), half);
    for_each_column_strip(in.width(), h, [&](int x0, int n, std::vector<double>& buf) {
        const auto hs = static_cast<std::size_t>(h);
        for (int y = 0; y < h; ++y) {
            const auto row = in.row(y);
            for (int j = 0; j < n; ++j) buf[static_cast<std::size_t>(j) * hs + y] = row[static_cast<std::size_t>(x0 + j)];
        }
        std::vector<double> a(static_cast<std::size_t>(half));
        std::vector<double> d(static_cast<std::size_t>(half));
        for (int j = 0; j < n; ++j) {
            forward_line(std::span<const double>(buf.data() + j * hs, hs), basis, a, d);
            for (int y = 0; y < half; ++y) {
                lo.at(x0 + j, y) = a[static_cast<std::size_t>(y)];
                hi.at(x0 + j, y) = d[static_cast<std::size_t>(y)];
            }
        }
    });
}

void dwt_rows_inverse(const Plane& lo, const Plane& hi, const WaveletBasis& basis, Plane& out) {
    out = Plane(lo.width() * 2, lo.height());
#pragma omp parallel for schedule(static)
    for (int y = 0; y < lo.height(); ++y) inverse_line(lo.row(y), hi.row(y), basis, out.row(y));
}

void dwt_cols_inverse(const Plane& lo, const Plane& hi, const WaveletBasis& basis, Plane& out) {
    const int half = lo.height();
    const int h = half * 2;
    out = Plane(lo.width(), h);
    for_each_column_strip(lo.width(), h, [&](int x0, int n, std::vector<double>& buf) {
        const auto hs = static_cast<std::size_t>(h);
        std::vector<double> a(static_cast<std::size_t>(half));
        std::vector<double> d(static_cast<std::size_t>(half));
        for (int j = 0; j < n; ++j) {
            for (int y = 0; y < half; ++y) {
                a[static_cast<std::size_t>(y)] = lo.at(x0 + j, y);
                d[static_cast<std::size_t>(y)] = hi.at(x0 + j, y);
            }
            inverse_line(a, d, basis, std::span<double>(buf.data() + j * hs, hs));
        }
        for (int y = 0; y < h; ++y) {
            auto row = out.row(y);
            for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(x0 + j)] = buf[static_cast<std::size_t>(j) * hs + y];
        }
    });
}

void convolve_rows(const Plane& in, std::span<const double> taps, Plane& out) {
    out = Plane(in.width(), in.height());
#pragma omp parallel for schedule(static)
    for (int y = 0; y < in.height(); ++y) detail::convolve_line(in.row(y), taps, out.row(y));
}

void convolve_cols(const Plane& in, std::span<const double> taps, Plane& out) {
    const int h = in.height();
    out = Plane(in.width(), h);
    for_each_column_strip(in.width(), h, [&](int x0, int n, std::vector<double>& buf) {
        const auto hs = static_cast<std::size_t>(h);
        for (int y = 0; y < h; ++y) {
            const auto row = in.row(y);
            for (int j = 0; j < n; ++j) buf[static_cast<std::size_t>(j) * hs + y] = row[static_cast<std::size_t>(x0 + j)];
        }
        std::vector<double> result(hs);
        for (int j = 0; j < n; ++j) {
            detail::convolve_line(std::span<const double>(buf.data() + j * hs, hs), taps, result);
            for (int y = 0; y < h; ++y) out.at(x0 + j, y) = result[static_cast<std::size_t>(y)];
        }
    });
}

// Gather formulation: each pixel scans the centers whose windows can reach
// it, in ascending index order, so ties resolve exactly as in the serial
// scatter loop.
void slic_assign(const Frame& f, std::span<const ClusterCenter> centers, SlicGeometry geom, std::vector<int>& labels) {
    const int w = f.width();
    const int h = f.height();
    const double sw = detail::spatial_weight(geom);
    const int bin = std::max(1, static_cast<int>(std::ceil(geom.step)) + 1);
    const int bins_x = (w + bin - 1) / bin;
    const int bins_y = (h + bin - 1) / bin;

    std::vector<std::vector<int>> binned(static_cast<std::size_t>(bins_x) * bins_y);
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const int bx = std::clamp(static_cast<int>(std::floor(centers[c].x / bin)), 0, bins_x - 1);
        const int by = std::clamp(static_cast<int>(std::floor(centers[c].y / bin)), 0, bins_y - 1);
        binned[static_cast<std::size_t>(by) * bins_x + bx].push_back(static_cast<int>(c));
    }

#pragma omp parallel
    {
        std::vector<int> candidates;
#pragma omp for schedule(dynamic)
        for (int cell = 0; cell < bins_x * bins_y; ++cell) {
            const int bx = cell % bins_x;
            const int by = cell / bins_x;
            candidates.clear();
            for (int ny = std::max(0, by - 1); ny <= std::min(bins_y - 1, by + 1); ++ny) {
                for (int nx = std::max(0, bx - 1); nx <= std::min(bins_x - 1, bx + 1); ++nx) {
                    const auto& list = binned[static_cast<std::size_t>(ny) * bins_x + nx];
                    candidates.insert(candidates.end(), list.begin(), list.end());
                }
            }
            std::sort(candidates.begin(), candidates.end());
            for (int y = by * bin; y < std::min(h, (by + 1) * bin); ++y) {
                for (int x = bx * bin; x < std::min(w, (bx + 1) * bin); ++x) {
                    const std::size_t idx = static_cast<std::size_t>(y) * w + x;
                    double best = std::numeric_limits<double>::infinity();
                    for (int c : candidates) {
                        const auto& center = centers[static_cast<std::size_t>(c)];
                        const auto win = detail::search_window(center, geom.step, w, h);
                        if (x < win.x0 || x > win.x1 || y < win.y0 || y > win.y1) continue;
                        const double d = detail::slic_distance2(f, idx, x, y, center, sw);
                        if (d < best) {
                            best = d;
                            labels[idx] = c;
                        }
                    }
                }
            }
        }
    }
}

}  // namespace wavescrub::kernels::omp
