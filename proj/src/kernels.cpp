#include "wavescrub/kernels.hpp"

#include <omp.h>

#include <string>

#include "wavescrub/error.hpp"

namespace wavescrub {

namespace {
int g_kernel_threads = 0;
}

void set_kernel_threads(int threads) noexcept {
    g_kernel_threads = threads;
    if (threads > 0) omp_set_num_threads(threads);
}

int kernel_threads() noexcept { return g_kernel_threads > 0 ? g_kernel_threads : omp_get_max_threads(); }

namespace kernels {

int mirror_index(int i, int n) noexcept {
    if (n == 1) return 0;
    const int period = 2 * n;
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - 1 - m;
}

namespace {

void require_even(int n, const char* axis) {
    if (n < 2 || n % 2 != 0) {
        throw Error(ErrorCode::OddLengthSignal, std::string(axis) + " length " + std::to_string(n) +
                                                    " must be even and >= 2");
    }
}

void require_same(const Plane& a, const Plane& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::BandLengthMismatch, "paired bands differ in size");
}

void require_taps(std::span<const double> taps) {
    if (taps.empty() || taps.size() % 2 == 0) throw Error(ErrorCode::InvalidParameter, "kernel length must be odd");
}

}  // namespace

void dwt_rows_forward(Exec exec, const Plane& in, const WaveletBasis& basis, Plane& lo, Plane& hi) {
    require_even(in.width(), "row");
    if (exec == Exec::Serial) {
        serial::dwt_rows_forward(in, basis, lo, hi);
    } else {
        omp::dwt_rows_forward(in, basis, lo, hi);
    }
}

void dwt_cols_forward(Exec exec, const Plane& in, const WaveletBasis& basis, Plane& lo, Plane& hi) {
    require_even(in.height(), "column");
    if (exec == Exec::Serial) {
        serial::dwt_cols_forward(in, basis, lo, hi);
    } else {
        omp::dwt_cols_forward(in, basis, lo, hi);
    }
}

void dwt_rows_inverse(Exec exec, const Plane& lo, const Plane& hi, const WaveletBasis& basis, Plane& out) {
    require_same(lo, hi);
    if (exec == Exec::Serial) {
        serial::dwt_rows_inverse(lo, hi, basis, out);
    } else {
        omp::dwt_rows_inverse(lo, hi, basis, out);
    }
}

void dwt_cols_inverse(Exec exec, const Plane& lo, const Plane& hi, const WaveletBasis& basis, Plane& out) {
    require_same(lo, hi);
    if (exec == Exec::Serial) {
        serial::dwt_cols_inverse(lo, hi, basis, out);
    } else {
        omp::dwt_cols_inverse(lo, hi, basis, out);
    }
}

void convolve_rows(Exec exec, const Plane& in, std::span<const double> taps, Plane& out) {
    require_taps(taps);
    if (exec == Exec::Serial) {
        serial::convolve_rows(in, taps, out);
    } else {
        omp::convolve_rows(in, taps, out);
    }
}

void convolve_cols(Exec exec, const Plane& in, std::span<const double> taps, Plane& out) {
    require_taps(taps);
    if (exec == Exec::Serial) {
        serial::convolve_cols(in, taps, out);
    } else {
        omp::convolve_cols(in, taps, out);
    }
}

void slic_assign(Exec exec, const Frame& f, std::span<const ClusterCenter> centers, SlicGeometry geom,
                 std::vector<int>& labels) {
    if (labels.size() != static_cast<std::size_t>(f.width()) * f.height()) {
        throw Error(ErrorCode::DimMismatch, "label map does not match frame");
    }
    if (f.channels() > 3) throw Error(ErrorCode::InvalidColorspace, "at most 3 channels");
    if (exec == Exec::Serial) {
        serial::slic_assign(f, centers, geom, labels);
    } else {
        omp::slic_assign(f, centers, geom, labels);
    }
}

}  // namespace kernels
}  // namespace wavescrub
