// Reference loop nests. Kept deliberately plain: these are what the OpenMP
// kernels are tested against.

#include <limits>
#include <vector>

#include "kernels_detail.hpp"

namespace wavescrub::kernels::serial {

void dwt_rows_forward(const Plane& in, const WaveletBasis& basis, Plane& lo, Plane& hi) {
    const int half = in.width() / 2;
    lo = Plane(half, in.height());
    hi = Plane(half, in.height());
    for (int y = 0; y < in.height(); ++y) forward_line(in.row(y), basis, lo.row(y), hi.row(y));
}

void dwt_cols_forward(const Plane& in, const WaveletBasis& basis, Plane& lo, Plane& hi) {
    const int half = in.height() / 2;
    lo = Plane(in.width(), half);
    hi = Plane(in.width(), half);
    std::vector<double> column(static_cast<std::size_t>(in.height()));
    std::vector<double> a(static_cast<std::size_t>(half));
    std::vector<double> d(static_cast<std::size_t>(half));
    for (int x = 0; x < in.width(); ++x) {
        for (int y = 0; y < in.height(); ++y) column[static_cast<std::size_t>(y)] = in.at(x, y);
        forward_line(column, basis, a, d);
        for (int y = 0; y < half; ++y) {
            lo.at(x, y) = a[static_cast<std::size_t>(y)];
            hi.at(x, y) = d[static_cast<std::size_t>(y)];
        }
    }
}

void dwt_rows_inverse(const Plane& lo, const Plane& hi, const WaveletBasis& basis, Plane& out) {
    out = Plane(lo.width() * 2, lo.height());
    for (int y = 0; y < lo.height(); ++y) inverse_line(lo.row(y), hi.row(y), basis, out.row(y));
}

void dwt_cols_inverse(const Plane& lo, const Plane& hi, const WaveletBasis& basis, Plane& out) {
    const int half = lo.height();
    out = Plane(lo.width(), half * 2);
    std::vector<double> a(static_cast<std::size_t>(half));
    std::vector<double> d(static_cast<std::size_t>(half));
    std::vector<double> column(static_cast<std::size_t>(half) * 2);
    for (int x = 0; x < lo.width(); ++x) {
        for (int y = 0; y < half; ++y) {
            a[static_cast<std::size_t>(y)] = lo.at(x, y);
            d[static_cast<std::size_t>(y)] = hi.at(x, y);
        }
        inverse_line(a, d, basis, column);
        for (int y = 0; y < half * 2; ++y) out.at(x, y) = column[static_cast<std::size_t>(y)];
    }
}

void convolve_rows(const Plane& in, std::span<const double> taps, Plane& out) {
    out = Plane(in.width(), in.height());
    for (int y = 0; y < in.height(); ++y) detail::convolve_line(in.row(y), taps, out.row(y));
}

void convolve_cols(const Plane& in, std::span<const double> taps, Plane& out) {
    out = Plane(in.width(), in.height());
    std::vector<double> column(static_cast<std::size_t>(in.height()));
    std::vector<double> result(column.size());
    for (int x = 0; x < in.width(); ++x) {
        for (int y = 0; y < in.height(); ++y) column[static_cast<std::size_t>(y)] = in.at(x, y);
        detail::convolve_line(column, taps, result);
        for (int y = 0; y < in.height(); ++y) out.at(x, y) = result[static_cast<std::size_t>(y)];
    }
}

void slic_assign(const Frame& f, std::span<const ClusterCenter> centers, SlicGeometry geom, std::vector<int>& labels) {
    const int w = f.width();
    std::vector<double> best(labels.size(), std::numeric_limits<double>::infinity());
    const double sw = detail::spatial_weight(geom);
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const auto win = detail::search_window(centers[c], geom.step, w, f.height());
        for (int y = win.y0; y <= win.y1; ++y) {
            for (int x = win.x0; x <= win.x1; ++x) {
                const std::size_t idx = static_cast<std::size_t>(y) * w + x;
                const double d = detail::slic_distance2(f, idx, x, y, centers[c], sw);
                if (d < best[idx]) {
                    best[idx] = d;
                    labels[idx] = static_cast<int>(c);
                }
            }
        }
    }
}

}  // namespace wavescrub::kernels::serial
