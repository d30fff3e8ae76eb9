#pragma once

// Data-parallel inner loops. Every kernel exists twice: `serial::` is the
// plain reference loop nest kept for testing, `omp::` is the OpenMP version.
// They must agree bit for bit; the unqualified functions dispatch on Exec.

#include <span>
#include <vector>

#include "wavescrub/dwt.hpp"
#include "wavescrub/exec.hpp"
#include "wavescrub/frame.hpp"

namespace wavescrub::kernels {

/// SLIC cluster center in (x, y, colour) space; unused colour slots are 0.
struct ClusterCenter {
    double x = 0.0;
    double y = 0.0;
    double color[3] = {0.0, 0.0, 0.0};
};

struct SlicGeometry {
    double step = 1.0;         // grid interval S
    double compactness = 1.0;  // m
};

/// Half-sample symmetric index into [0, n), valid for any offset.
int mirror_index(int i, int n) noexcept;

namespace serial {
void dwt_rows_forward(const Plane& in, const WaveletBasis& basis, Plane& lo, Plane& hi);
void dwt_cols_forward(const Plane& in, const WaveletBasis& basis, Plane& lo, Plane& hi);
void dwt_rows_inverse(const Plane& lo, const Plane& hi, const WaveletBasis& basis, Plane& out);
void dwt_cols_inverse(const Plane& lo, const Plane& hi, const WaveletBasis& basis, Plane& out);
void convolve_rows(const Plane& in, std::span<const double> taps, Plane& out);
void convolve_cols(const Plane& in, std::span<const double> taps, Plane& out);
void slic_assign(const Frame& f, std::span<const ClusterCenter> centers, SlicGeometry geom, std::vector<int>& labels);
}  // namespace serial

namespace omp {
void dwt_rows_forward(const Plane& in, const WaveletBasis& basis, Plane& lo, Plane& hi);
void dwt_cols_forward(const Plane& in, const WaveletBasis& basis, Plane& lo, Plane& hi);
void dwt_rows_inverse(const Plane& lo, const Plane& hi, const WaveletBasis& basis, Plane& out);
void dwt_cols_inverse(const Plane& lo, const Plane& hi, const WaveletBasis& basis, Plane& out);
void convolve_rows(const Plane& in, std::span<const double> taps, Plane& out);
void convolve_cols(const Plane& in, std::span<const double> taps, Plane& out);
void slic_assign(const Frame& f, std::span<const ClusterCenter> centers, SlicGeometry geom, std::vector<int>& labels);
}  // namespace omp

// `in` width must be even; `lo`/`hi` are resized to (width/2, height).
void dwt_rows_forward(Exec exec, const Plane& in, const WaveletBasis& basis, Plane& lo, Plane& hi);
// `in` height must be even; `lo`/`hi` are resized to (width, height/2).
void dwt_cols_forward(Exec exec, const Plane& in, const WaveletBasis& basis, Plane& lo, Plane& hi);
void dwt_rows_inverse(Exec exec, const Plane& lo, const Plane& hi, const WaveletBasis& basis, Plane& out);
void dwt_cols_inverse(Exec exec, const Plane& lo, const Plane& hi, const WaveletBasis& basis, Plane& out);

/// Odd-length centred kernel, half-sample symmetric boundary extension.
void convolve_rows(Exec exec, const Plane& in, std::span<const double> taps, Plane& out);
void convolve_cols(Exec exec, const Plane& in, std::span<const double> taps, Plane& out);

/// One SLIC assignment sweep. Each center searches a window of +-S around
/// itself; pixels no window reaches keep their incoming label. Ties go to the
/// lowest center index.
void slic_assign(Exec exec, const Frame& f, std::span<const ClusterCenter> centers, SlicGeometry geom,
                 std::vector<int>& labels);

}  // namespace wavescrub::kernels
