#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "wavescrub/exec.hpp"
#include "wavescrub/frame.hpp"

namespace wavescrub {

enum class BasisId { Haar = 0, Db4 = 1, Cdf97 = 2 };

std::string_view to_string(BasisId id) noexcept;
BasisId parse_basis(std::string_view name);

/// Predict/update factorisation of the CDF 9/7 filter pair.
struct LiftingScheme {
    double alpha = -1.586134342;
    double beta = -0.052980118;
    double gamma = 0.882911076;
    double delta = 0.443506852;
    double zeta = 1.149604398;
};

/// Haar and Db4 are orthonormal filter banks evaluated with periodic
/// extension; Cdf97 is evaluated through `lifting` with whole-sample
/// symmetric extension. For Cdf97 the filter vectors are empty.
struct WaveletBasis {
    BasisId id = BasisId::Haar;
    std::vector<double> analysis_lowpass;
    std::vector<double> analysis_highpass;
    std::vector<double> synthesis_lowpass;
    std::vector<double> synthesis_highpass;
    std::optional<LiftingScheme> lifting;

    static WaveletBasis make(BasisId id);
};

// Line transforms on caller-validated spans: `signal` has even length >= 2,
// `approx` and `detail` each hold half of it. Used by the 2D kernels.
void forward_line(std::span<const double> signal, const WaveletBasis& basis, std::span<double> approx,
                  std::span<double> detail);
void inverse_line(std::span<const double> approx, std::span<const double> detail, const WaveletBasis& basis,
                  std::span<double> signal);

struct LineBands {
    std::vector<double> approx;
    std::vector<double> detail;
};

LineBands dwt1d_forward(std::span<const double> signal, const WaveletBasis& basis);
std::vector<double> dwt1d_inverse(std::span<const double> approx, std::span<const double> detail,
                                  const WaveletBasis& basis);

enum class BandKind { LL, LH, HL, HH };

std::string_view to_string(BandKind kind) noexcept;

/// One row/column replicated before a level when the input axis is odd.
struct PadAmount {
    int right = 0;
    int bottom = 0;

    friend bool operator==(const PadAmount&, const PadAmount&) = default;
};

struct LevelBands {
    Plane ll;
    Plane lh;
    Plane hl;
    Plane hh;
    PadAmount pad;
};

/// Single separable level: rows, then columns. LH is row-lowpass/column-highpass.
LevelBands dwt2d_level(const Plane& p, const WaveletBasis& basis, Exec exec = Exec::Parallel);
Plane idwt2d_level(const Plane& ll, const Plane& lh, const Plane& hl, const Plane& hh, const WaveletBasis& basis,
                   Exec exec = Exec::Parallel);

struct DetailBands {
    Plane lh;
    Plane hl;
    Plane hh;

    Plane& operator[](BandKind kind);
    const Plane& operator[](BandKind kind) const;
};

/// Multi-level decomposition of one plane. `details[k]` and `pad_log[k]`
/// belong to level k+1, so index 0 is the finest scale.
struct Pyramid {
    WaveletBasis basis;
    int levels = 0;
    Plane approx;
    std::vector<DetailBands> details;
    Size original_size;
    std::vector<PadAmount> pad_log;

    /// Band at `level` in 1..levels; LL is only valid at `levels`.
    const Plane& band(int level, BandKind kind) const;
    Plane& band(int level, BandKind kind);
};

/// Largest level count `decompose` accepts for a frame of this size.
int max_levels(Size s) noexcept;

/// Dimensions of the approximation band after each level; element 0 is `s`.
std::vector<Size> level_sizes(Size s, int levels);

Pyramid decompose(const Plane& p, const WaveletBasis& basis, int levels, Exec exec = Exec::Parallel);
std::vector<Pyramid> decompose(const Frame& f, const WaveletBasis& basis, int levels, Exec exec = Exec::Parallel);
Plane reconstruct(const Pyramid& p, Exec exec = Exec::Parallel);

/// LL band after `levels` levels; `levels == 0` returns the input.
Plane approximation(const Plane& p, const WaveletBasis& basis, int levels, Exec exec = Exec::Parallel);

// Debug dump: "WPYR" magic, little-endian u32 header
// (version, basis id, levels, channels, width, height), then per channel the
// bands LL_L, LH_L, HL_L, HH_L, ..., LH_1, HL_1, HH_1, each as u32 width,
// u32 height and width*height f32 samples.
void write_pyramid_dump(std::ostream& out, std::span<const Pyramid> pyramids);
std::vector<Pyramid> read_pyramid_dump(std::istream& in);

}  // namespace wavescrub
