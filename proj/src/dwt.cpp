#include "wavescrub/dwt.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "wavescrub/error.hpp"
#include "wavescrub/kernels.hpp"

namespace wavescrub {

std::string_view to_string(BasisId id) noexcept {
    switch (id) {
    case BasisId::Haar: return "haar";
    case BasisId::Db4: return "db4";
    case BasisId::Cdf97: return "cdf97";
    }
    return "unknown";
}

BasisId parse_basis(std::string_view name) {
    if (name == "haar") return BasisId::Haar;
    if (name == "db4") return BasisId::Db4;
    if (name == "cdf97") return BasisId::Cdf97;
    throw Error(ErrorCode::InvalidParameter, "unknown basis '" + std::string(name) + "' (haar|db4|cdf97)");
}

std::string_view to_string(BandKind kind) noexcept {
    switch (kind) {
    case BandKind::LL: return "LL";
    case BandKind::LH: return "LH";
    case BandKind::HL: return "HL";
    case BandKind::HH: return "HH";
    }
    return "??";
}

WaveletBasis WaveletBasis::make(BasisId id) {
    WaveletBasis b;
    b.id = id;
    switch (id) {
    case BasisId::Haar: {
        const double s = 1.0 / std::sqrt(2.0);
        b.analysis_lowpass = {s, s};
        b.analysis_highpass = {s, -s};
        break;
    }
    case BasisId::Db4: {
        const double r3 = std::sqrt(3.0);
        const double norm = 4.0 * std::sqrt(2.0);
        b.analysis_lowpass = {(1 + r3) / norm, (3 + r3) / norm, (3 - r3) / norm, (1 - r3) / norm};
        const auto& h = b.analysis_lowpass;
        b.analysis_highpass = {h[3], -h[2], h[1], -h[0]};
        break;
    }
    case BasisId::Cdf97:
        b.lifting = LiftingScheme{};
        return b;
    }
    // Orthonormal: synthesis filters are the time-reversed analysis filters.
    b.synthesis_lowpass.assign(b.analysis_lowpass.rbegin(), b.analysis_lowpass.rend());
    b.synthesis_highpass.assign(b.analysis_highpass.rbegin(), b.analysis_highpass.rend());
    return b;
}

namespace {

// Periodic filter bank: approx[i] = sum_k h[k] x[(2i+k) mod n].
void filter_bank_forward(std::span<const double> x, const WaveletBasis& b, std::span<double> lo,
                         std::span<double> hi) {
    const std::size_t n = x.size();
    const auto& h = b.analysis_lowpass;
    const auto& g = b.analysis_highpass;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            const double v = x[(2 * i + k) % n];
            a += h[k] * v;
            d += g[k] * v;
        }
        lo[i] = a;
        hi[i] = d;
    }
}

// Transpose of the forward operator.
void filter_bank_inverse(std::span<const double> lo, std::span<const double> hi, const WaveletBasis& b,
                         std::span<double> x) {
    const std::size_t n = x.size();
    const auto& h = b.analysis_lowpass;
    const auto& g = b.analysis_highpass;
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < lo.size(); ++i) {
        for (std::size_t k = 0; k < h.size(); ++k) x[(2 * i + k) % n] += h[k] * lo[i] + g[k] * hi[i];
    }
}

// Lifting on the deinterleaved halves. Whole-sample symmetric extension:
// x[-1] = x[1] gives d[-1] = d[0]; x[n] = x[n-2] gives s[half] = s[half-1].
void predict(std::span<const double> s, std::span<double> d, double c) {
    const std::size_t m = d.size();
    for (std::size_t i = 0; i + 1 < m; ++i) d[i] += c * (s[i] + s[i + 1]);
    d[m - 1] += c * (s[m - 1] + s[m - 1]);
}

void update(std::span<double> s, std::span<const double> d, double c) {
    const std::size_t m = s.size();
    s[0] += c * (d[0] + d[0]);
    for (std::size_t i = 1; i < m; ++i) s[i] += c * (d[i - 1] + d[i]);
}

void lifting_forward(std::span<const double> x, const LiftingScheme& ls, std::span<double> lo, std::span<double> hi) {
    const std::size_t m = lo.size();
    for (std::size_t i = 0; i < m; ++i) {
        lo[i] = x[2 * i];
        hi[i] = x[2 * i + 1];
    }
    predict(lo, hi, ls.alpha);
    update(lo, hi, ls.beta);
    predict(lo, hi, ls.gamma);
    update(lo, hi, ls.delta);
    for (std::size_t i = 0; i < m; ++i) {
        lo[i] *= ls.zeta;
        hi[i] /= ls.zeta;
    }
}

void lifting_inverse(std::span<const double> lo, std::span<const double> hi, const LiftingScheme& ls,
                     std::span<double> x) {
    const std::size_t m = lo.size();
    std::vector<double> s(m);
    std::vector<double> d(m);
    for (std::size_t i = 0; i < m; ++i) {
        s[i] = lo[i] / ls.zeta;
        d[i] = hi[i] * ls.zeta;
    }
    update(s, d, -ls.delta);
    predict(s, d, -ls.gamma);
    update(s, d, -ls.beta);
    predict(s, d, -ls.alpha);
    for (std::size_t i = 0; i < m; ++i) {
        x[2 * i] = s[i];
        x[2 * i + 1] = d[i];
    }
}

void check_signal(std::size_t n) {
    if (n < 2) throw Error(ErrorCode::SignalTooShort, "signal needs at least 2 samples, got " + std::to_string(n));
    if (n % 2 != 0) throw Error(ErrorCode::OddLengthSignal, "signal length " + std::to_string(n) + " is odd");
}

Plane pad_to_even(const Plane& p, PadAmount& pad) {
    pad.right = p.width() % 2;
    pad.bottom = p.height() % 2;
    if (pad.right == 0 && pad.bottom == 0) return p;
    const int w = p.width() + pad.right;
    const int h = p.height() + pad.bottom;
    Plane out(w, h);
    for (int y = 0; y < h; ++y) {
        const auto src = p.row(std::min(y, p.height() - 1));
        auto dst = out.row(y);
        std::copy(src.begin(), src.end(), dst.begin());
        if (pad.right) dst[static_cast<std::size_t>(w - 1)] = src.back();
    }
    return out;
}

void check_levels(Size s, int levels) {
    const int allowed = max_levels(s);
    if (levels < 1 || levels > allowed) {
        throw Error(ErrorCode::TooManyLevels,
                    std::to_string(levels) + " levels requested for " + std::to_string(s.width) + "x" +
                        std::to_string(s.height) + "; allowed 1.." + std::to_string(allowed),
                    allowed);
    }
}

}  // namespace

void forward_line(std::span<const double> signal, const WaveletBasis& basis, std::span<double> approx,
                  std::span<double> detail) {
    if (basis.lifting) {
        lifting_forward(signal, *basis.lifting, approx, detail);
    } else {
        filter_bank_forward(signal, basis, approx, detail);
    }
}

void inverse_line(std::span<const double> approx, std::span<const double> detail, const WaveletBasis& basis,
                  std::span<double> signal) {
    if (basis.lifting) {
        lifting_inverse(approx, detail, *basis.lifting, signal);
    } else {
        filter_bank_inverse(approx, detail, basis, signal);
    }
}

LineBands dwt1d_forward(std::span<const double> signal, const WaveletBasis& basis) {
    check_signal(signal.size());
    LineBands out{std::vector<double>(signal.size() / 2), std::vector<double>(signal.size() / 2)};
    forward_line(signal, basis, out.approx, out.detail);
    return out;
}

std::vector<double> dwt1d_inverse(std::span<const double> approx, std::span<const double> detail,
                                  const WaveletBasis& basis) {
    if (approx.size() != detail.size()) {
        throw Error(ErrorCode::BandLengthMismatch, "approx has " + std::to_string(approx.size()) +
                                                       " samples, detail has " + std::to_string(detail.size()));
    }
    if (approx.empty()) throw Error(ErrorCode::SignalTooShort, "empty bands");
    std::vector<double> out(approx.size() * 2);
    inverse_line(approx, detail, basis, out);
    return out;
}

LevelBands dwt2d_level(const Plane& p, const WaveletBasis& basis, Exec exec) {
    if (p.empty()) throw Error(ErrorCode::EmptyPlane, "cannot transform an empty plane");
    LevelBands out;
    const Plane padded = pad_to_even(p, out.pad);
    Plane lo;
    Plane hi;
    kernels::dwt_rows_forward(exec, padded, basis, lo, hi);
    kernels::dwt_cols_forward(exec, lo, basis, out.ll, out.lh);
    kernels::dwt_cols_forward(exec, hi, basis, out.hl, out.hh);
    return out;
}

Plane idwt2d_level(const Plane& ll, const Plane& lh, const Plane& hl, const Plane& hh, const WaveletBasis& basis,
                   Exec exec) {
    const Size s = ll.size();
    if (ll.empty() || lh.size() != s || hl.size() != s || hh.size() != s) {
        throw Error(ErrorCode::CorruptPyramid, "subbands of one level differ in size");
    }
    Plane lo;
    Plane hi;
    kernels::dwt_cols_inverse(exec, ll, lh, basis, lo);
    kernels::dwt_cols_inverse(exec, hl, hh, basis, hi);
    Plane out;
    kernels::dwt_rows_inverse(exec, lo, hi, basis, out);
    return out;
}

Plane& DetailBands::operator[](BandKind kind) {
    switch (kind) {
    case BandKind::LH: return lh;
    case BandKind::HL: return hl;
    case BandKind::HH: return hh;
    case BandKind::LL: break;
    }
    throw Error(ErrorCode::InvalidParameter, "LL is not a detail band");
}

const Plane& DetailBands::operator[](BandKind kind) const { return const_cast<DetailBands&>(*this)[kind]; }

const Plane& Pyramid::band(int level, BandKind kind) const { return const_cast<Pyramid&>(*this).band(level, kind); }

Plane& Pyramid::band(int level, BandKind kind) {
    if (level < 1 || level > levels) {
        throw Error(ErrorCode::InvalidParameter, "level " + std::to_string(level) + " outside 1.." +
                                                     std::to_string(levels));
    }
    if (kind == BandKind::LL) {
        if (level != levels) throw Error(ErrorCode::InvalidParameter, "LL only stored at the deepest level");
        return approx;
    }
    return details[static_cast<std::size_t>(level - 1)][kind];
}

int max_levels(Size s) noexcept {
    int m = std::min(s.width, s.height);
    int levels = 0;
    while (m >= 2) {
        ++levels;
        m = (m + 1) / 2;
    }
    return levels;
}

std::vector<Size> level_sizes(Size s, int levels) {
    std::vector<Size> out{s};
    for (int k = 0; k < levels; ++k) {
        s = {(s.width + 1) / 2, (s.height + 1) / 2};
        out.push_back(s);
    }
    return out;
}

Pyramid decompose(const Plane& p, const WaveletBasis& basis, int levels, Exec exec) {
    check_levels(p.size(), levels);
    Pyramid pyr;
    pyr.basis = basis;
    pyr.levels = levels;
    pyr.original_size = p.size();
    pyr.details.reserve(static_cast<std::size_t>(levels));
    pyr.pad_log.reserve(static_cast<std::size_t>(levels));
    Plane current = p;
    for (int k = 0; k < levels; ++k) {
        LevelBands lb = dwt2d_level(current, basis, exec);
        pyr.details.push_back({std::move(lb.lh), std::move(lb.hl), std::move(lb.hh)});
        pyr.pad_log.push_back(lb.pad);
        current = std::move(lb.ll);
    }
    pyr.approx = std::move(current);
    return pyr;
}

std::vector<Pyramid> decompose(const Frame& f, const WaveletBasis& basis, int levels, Exec exec) {
    check_levels(f.size(), levels);
    std::vector<Pyramid> out;
    out.reserve(f.planes().size());
    for (const auto& p : f.planes()) out.push_back(decompose(p, basis, levels, exec));
    return out;
}

Plane reconstruct(const Pyramid& p, Exec exec) {
    const auto corrupt = [](const std::string& why) { throw Error(ErrorCode::CorruptPyramid, why); };
    if (p.levels < 1 || p.details.size() != static_cast<std::size_t>(p.levels) ||
        p.pad_log.size() != static_cast<std::size_t>(p.levels)) {
        corrupt("level count does not match stored bands");
    }
    if (p.original_size.width < 1 || p.original_size.height < 1) corrupt("invalid original size");
    const auto sizes = level_sizes(p.original_size, p.levels);
    if (p.approx.size() != sizes.back()) corrupt("approximation band has unexpected size");

    Plane current = p.approx;
    for (int k = p.levels; k >= 1; --k) {
        const auto& d = p.details[static_cast<std::size_t>(k - 1)];
        const Size expect = sizes[static_cast<std::size_t>(k)];
        if (d.lh.size() != expect || d.hl.size() != expect || d.hh.size() != expect) {
            corrupt("detail bands at level " + std::to_string(k) + " have unexpected size");
        }
        const Size parent = sizes[static_cast<std::size_t>(k - 1)];
        const PadAmount pad = p.pad_log[static_cast<std::size_t>(k - 1)];
        if (pad.right != parent.width % 2 || pad.bottom != parent.height % 2) {
            corrupt("pad log disagrees with level " + std::to_string(k) + " dimensions");
        }
        Plane up = idwt2d_level(current, d.lh, d.hl, d.hh, p.basis, exec);
        if (pad.right || pad.bottom) up = crop(up, Region{0, 0, parent.width, parent.height});
        current = std::move(up);
    }
    return current;
}

Plane approximation(const Plane& p, const WaveletBasis& basis, int levels, Exec exec) {
    if (levels == 0) return p;
    return decompose(p, basis, levels, exec).approx;
}

namespace {

constexpr char kMagic[4] = {'W', 'P', 'Y', 'R'};
constexpr std::uint32_t kDumpVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw Error(ErrorCode::TruncatedPayload, "pyramid dump truncated");
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

void put_plane(std::ostream& out, const Plane& p) {
    put_u32(out, static_cast<std::uint32_t>(p.width()));
    put_u32(out, static_cast<std::uint32_t>(p.height()));
    for (double v : p.samples()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

Plane get_plane(std::istream& in, Size expect) {
    const auto w = get_u32(in);
    const auto h = get_u32(in);
    if (w != static_cast<std::uint32_t>(expect.width) || h != static_cast<std::uint32_t>(expect.height)) {
        throw Error(ErrorCode::CorruptPyramid, "band dimensions in dump disagree with header");
    }
    Plane p(expect.width, expect.height);
    for (auto& v : p.samples()) v = std::bit_cast<float>(get_u32(in));
    return p;
}

}  // namespace

void write_pyramid_dump(std::ostream& out, std::span<const Pyramid> pyramids) {
    if (pyramids.empty()) throw Error(ErrorCode::InvalidParameter, "nothing to dump");
    const Pyramid& first = pyramids.front();
    out.write(kMagic, 4);
    put_u32(out, kDumpVersion);
    put_u32(out, static_cast<std::uint32_t>(first.basis.id));
    put_u32(out, static_cast<std::uint32_t>(first.levels));
    put_u32(out, static_cast<std::uint32_t>(pyramids.size()));
    put_u32(out, static_cast<std::uint32_t>(first.original_size.width));
    put_u32(out, static_cast<std::uint32_t>(first.original_size.height));
    for (const auto& p : pyramids) {
        if (p.levels != first.levels || p.original_size != first.original_size || p.basis.id != first.basis.id) {
            throw Error(ErrorCode::CorruptPyramid, "channel pyramids differ in shape");
        }
        put_plane(out, p.approx);
        for (int k = p.levels; k >= 1; --k) {
            const auto& d = p.details[static_cast<std::size_t>(k - 1)];
            put_plane(out, d.lh);
            put_plane(out, d.hl);
            put_plane(out, d.hh);
        }
    }
}

std::vector<Pyramid> read_pyramid_dump(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4)) throw Error(ErrorCode::TruncatedPayload, "pyramid dump truncated");
    if (std::memcmp(magic, kMagic, 4) != 0) throw Error(ErrorCode::BadMagic, "not a WPYR dump");
    if (get_u32(in) != kDumpVersion) throw Error(ErrorCode::UnsupportedFormat, "unknown WPYR version");
    const auto basis = get_u32(in);
    if (basis > 2) throw Error(ErrorCode::MalformedHeader, "unknown basis id " + std::to_string(basis));
    const auto levels = static_cast<int>(get_u32(in));
    const auto channels = get_u32(in);
    const Size size{static_cast<int>(get_u32(in)), static_cast<int>(get_u32(in))};
    if (channels < 1 || channels > 3 || size.width < 1 || size.height < 1 || levels < 1 ||
        levels > max_levels(size)) {
        throw Error(ErrorCode::MalformedHeader, "implausible WPYR header");
    }
    const auto sizes = level_sizes(size, levels);
    std::vector<Pyramid> out;
    for (std::uint32_t c = 0; c < channels; ++c) {
        Pyramid p;
        p.basis = WaveletBasis::make(static_cast<BasisId>(basis));
        p.levels = levels;
        p.original_size = size;
        p.details.resize(static_cast<std::size_t>(levels));
        for (int k = 0; k < levels; ++k) {
            const Size s = sizes[static_cast<std::size_t>(k)];
            p.pad_log.push_back({s.width % 2, s.height % 2});
        }
        p.approx = get_plane(in, sizes.back());
        for (int k = levels; k >= 1; --k) {
            auto& d = p.details[static_cast<std::size_t>(k - 1)];
            const Size s = sizes[static_cast<std::size_t>(k)];
            d.lh = get_plane(in, s);
            d.hl = get_plane(in, s);
            d.hh = get_plane(in, s);
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace wavescrub
