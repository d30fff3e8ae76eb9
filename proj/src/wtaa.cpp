#include "wavescrub/wtaa.hpp"

#include <cmath>
#include <string>

#include "wavescrub/error.hpp"

namespace wavescrub {

namespace {

std::size_t band_slot(BandKind kind) {
    switch (kind) {
    case BandKind::LH: return 0;
    case BandKind::HL: return 1;
    case BandKind::HH: return 2;
    case BandKind::LL: break;
    }
    throw Error(ErrorCode::InvalidParameter, "LL gain is approx_gain");
}

void check_level(const DestructionPolicy& p, int level) {
    if (level < 1 || level > p.levels) {
        throw Error(ErrorCode::PolicyLevelMismatch,
                    "level " + std::to_string(level) + " outside policy range 1.." + std::to_string(p.levels));
    }
}

void scale(Plane& p, double g) {
    if (g == 1.0) return;
    for (auto& v : p.samples()) v *= g;
}

Plane process_plane(const Plane& p, const WaveletBasis& basis, const DestructionPolicy& policy, Exec exec) {
    return reconstruct(apply_policy(decompose(p, basis, policy.levels, exec), policy), exec);
}

}  // namespace

double DestructionPolicy::gain(int level, BandKind kind) const {
    check_level(*this, level);
    return gains[static_cast<std::size_t>(level - 1)][band_slot(kind)];
}

void DestructionPolicy::set_gain(int level, BandKind kind, double g) {
    check_level(*this, level);
    gains[static_cast<std::size_t>(level - 1)][band_slot(kind)] = g;
}

void DestructionPolicy::validate() const {
    if (levels < 1) throw Error(ErrorCode::InvalidDepth, "policy needs at least one level");
    if (gains.size() != static_cast<std::size_t>(levels)) {
        throw Error(ErrorCode::PolicyLevelMismatch, "policy has " + std::to_string(gains.size()) +
                                                        " gain triples for " + std::to_string(levels) + " levels");
    }
    const auto ok = [](double g) { return std::isfinite(g) && g >= 0.0 && g <= 1.0; };
    if (!ok(approx_gain)) throw Error(ErrorCode::InvalidGain, "approx_gain must lie in [0,1]");
    for (const auto& triple : gains) {
        for (double g : triple) {
            if (!ok(g)) throw Error(ErrorCode::InvalidGain, "band gain " + std::to_string(g) + " outside [0,1]");
        }
    }
}

DestructionPolicy DestructionPolicy::identity(int levels) {
    if (levels < 1) throw Error(ErrorCode::InvalidDepth, "policy needs at least one level");
    DestructionPolicy p;
    p.levels = levels;
    p.gains.assign(static_cast<std::size_t>(levels), {1.0, 1.0, 1.0});
    return p;
}

DestructionPolicy default_policy(int levels, int destroy_finest) {
    if (destroy_finest < 0 || destroy_finest > levels) {
        throw Error(ErrorCode::InvalidDepth, "destroy_finest " + std::to_string(destroy_finest) + " outside 0.." +
                                                 std::to_string(levels));
    }
    auto p = DestructionPolicy::identity(levels);
    for (int k = 0; k < destroy_finest; ++k) p.gains[static_cast<std::size_t>(k)] = {0.0, 0.0, 0.0};
    return p;
}

DestructionPolicy default_chroma_policy(int levels, int destroy_finest) {
    if (destroy_finest < 0 || destroy_finest > levels) return default_policy(levels, destroy_finest);
    return default_policy(levels, destroy_finest > 0 ? destroy_finest - 1 : 0);
}

DestructionPolicy graded_policy(int levels, double depth) {
    if (!std::isfinite(depth) || depth < 0.0 || depth > levels) {
        throw Error(ErrorCode::InvalidDepth, "depth " + std::to_string(depth) + " outside 0.." + std::to_string(levels));
    }
    const int whole = static_cast<int>(std::floor(depth));
    auto p = default_policy(levels, whole);
    const double frac = depth - whole;
    if (frac > 0.0) {
        const double keep = 1.0 - frac;
        p.gains[static_cast<std::size_t>(whole)] = {keep, keep, keep};
    }
    return p;
}

std::string_view to_string(ColorMode m) noexcept {
    return m == ColorMode::LumaChroma ? "luma-chroma" : "per-channel";
}

ColorMode parse_color_mode(std::string_view name) {
    if (name == "per-channel") return ColorMode::PerRgbChannel;
    if (name == "luma-chroma") return ColorMode::LumaChroma;
    throw Error(ErrorCode::InvalidParameter, "unknown colour mode '" + std::string(name) +
                                                 "' (per-channel|luma-chroma)");
}

Pyramid apply_policy(const Pyramid& p, const DestructionPolicy& policy) {
    if (policy.levels != p.levels) {
        throw Error(ErrorCode::PolicyLevelMismatch, "policy has " + std::to_string(policy.levels) +
                                                        " levels, pyramid has " + std::to_string(p.levels));
    }
    policy.validate();
    Pyramid out = p;
    scale(out.approx, policy.approx_gain);
    for (int level = 1; level <= p.levels; ++level) {
        auto& d = out.details[static_cast<std::size_t>(level - 1)];
        for (BandKind kind : {BandKind::LH, BandKind::HL, BandKind::HH}) scale(d[kind], policy.gain(level, kind));
    }
    return out;
}

Frame anonymize_wtaa(const Frame& f, const WtaaConfig& cfg, Exec exec) {
    cfg.policy.validate();
    if (cfg.chroma_policy) {
        cfg.chroma_policy->validate();
        if (cfg.chroma_policy->levels != cfg.policy.levels) {
            throw Error(ErrorCode::PolicyLevelMismatch, "chroma policy level count differs from luma policy");
        }
    }
    if (cfg.policy.levels > max_levels(f.size())) {
        throw Error(ErrorCode::TooManyLevels,
                    std::to_string(cfg.policy.levels) + " levels requested for " + std::to_string(f.width()) + "x" +
                        std::to_string(f.height()),
                    max_levels(f.size()));
    }

    if (cfg.colorspace_mode == ColorMode::PerRgbChannel) {
        std::vector<Plane> planes;
        for (const auto& p : f.planes()) planes.push_back(process_plane(p, cfg.basis, cfg.policy, exec));
        Frame out(f.colorspace(), std::move(planes));
        clamp_unit(out);
        return out;
    }

    if (f.colorspace() == Colorspace::Gray) {
        throw Error(ErrorCode::InvalidColorspace, "luma-chroma mode needs an RGB or YCbCr frame");
    }
    const Frame ycc = f.colorspace() == Colorspace::RGB ? rgb_to_ycbcr(f) : f;
    const DestructionPolicy& chroma = cfg.chroma_policy ? *cfg.chroma_policy : cfg.policy;
    std::vector<Plane> planes;
    planes.push_back(process_plane(ycc.channel(0), cfg.basis, cfg.policy, exec));
    planes.push_back(process_plane(ycc.channel(1), cfg.basis, chroma, exec));
    planes.push_back(process_plane(ycc.channel(2), cfg.basis, chroma, exec));
    Frame out(Colorspace::YCbCr, std::move(planes));
    if (f.colorspace() == Colorspace::RGB) out = ycbcr_to_rgb(out);
    clamp_unit(out);
    return out;
}

int locality_radius(BasisId basis, int levels) noexcept {
    // Per level, reach of analysis plus synthesis in that level's sample
    // units: Haar stays inside its 2-sample block, Db4 spans 4 taps each way,
    // the 9/7 lifting chain reaches 4 analysis and 3 synthesis samples.
    int per_level = 0;
    switch (basis) {
    case BasisId::Haar: per_level = 1; break;
    case BasisId::Db4: per_level = 8; break;
    case BasisId::Cdf97: per_level = 8; break;
    }
    int radius = 0;
    for (int k = 1; k <= levels; ++k) radius += per_level << k;
    return radius;
}

}  // namespace wavescrub
