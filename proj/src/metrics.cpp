#include "wavescrub/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "wavescrub/baselines.hpp"
#include "wavescrub/error.hpp"
#include "wavescrub/kernels.hpp"

namespace wavescrub {

namespace {

constexpr int kSsimWindow = 11;
constexpr int kSsimHalf = kSsimWindow / 2;
constexpr double kSsimSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> ssim_taps() {
    // radius ceil(3 * 1.5) = 5 gives exactly the 11-tap window.
    return gaussian_kernel(GaussianParams{kSsimSigma});
}

Plane multiply(const Plane& a, const Plane& b) {
    Plane out(a.width(), a.height());
    auto x = a.samples();
    auto y = b.samples();
    auto o = out.samples();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = x[i] * y[i];
    return out;
}

Plane filter(const Plane& p, std::span<const double> taps, Exec exec) {
    Plane tmp;
    Plane out;
    kernels::convolve_rows(exec, p, taps, tmp);
    kernels::convolve_cols(exec, tmp, taps, out);
    return out;
}

double region_mean(const Plane& p, const Region& r) {
    double sum = 0.0;
    for (int y = r.y; y < r.y + r.h; ++y) {
        for (int x = r.x; x < r.x + r.w; ++x) sum += p.at(x, y);
    }
    return sum / (static_cast<double>(r.w) * r.h);
}

void require_inside(const Region& r, Size s) {
    if (!r.inside(s)) {
        throw Error(ErrorCode::RegionOutOfBounds,
                    "region (" + std::to_string(r.x) + "," + std::to_string(r.y) + "," + std::to_string(r.w) + "," +
                        std::to_string(r.h) + ") outside frame");
    }
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    constexpr double kFlat = 1e-18;
    if (saa <= kFlat * n) return sbb <= kFlat * n ? 1.0 : 0.0;
    if (sbb <= kFlat * n) return 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), 0.0, 1.0);
}

double ssim_over(const Plane& map, const Region& r) {
    // Window centres inside r; a region closer than half a window to the
    // border falls back to the nearest full windows.
    const auto span = [](int lo, int len, int n) {
        return std::pair{std::clamp(lo - kSsimHalf, 0, n - 1), std::clamp(lo + len - 1 - kSsimHalf, 0, n - 1) + 1};
    };
    const auto [x0, x1] = span(r.x, r.w, map.width());
    const auto [y0, y1] = span(r.y, r.h, map.height());
    double sum = 0.0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) sum += map.at(x, y);
    }
    return sum / (static_cast<double>(x1 - x0) * (y1 - y0));
}

}  // namespace

double round6(double v) { return std::round(v * 1e6) / 1e6; }

double psnr(const Frame& a, const Frame& b) {
    require_same_shape(a, b);
    double sse = 0.0;
    std::size_t n = 0;
    for (int c = 0; c < a.channels(); ++c) {
        auto x = a.channel(c).samples();
        auto y = b.channel(c).samples();
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = x[i] - y[i];
            sse += d * d;
        }
        n += x.size();
    }
    const double mse = sse / static_cast<double>(n);
    if (mse <= 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

Plane ssim_map(const Frame& a, const Frame& b, Exec exec) {
    require_same_shape(a, b);
    if (std::min(a.width(), a.height()) < kSsimWindow) {
        throw Error(ErrorCode::FrameTooSmall, "SSIM needs both dimensions >= 11");
    }
    const auto taps = ssim_taps();
    const int mw = a.width() - 2 * kSsimHalf;
    const int mh = a.height() - 2 * kSsimHalf;
    Plane map(mw, mh, 0.0);
    for (int c = 0; c < a.channels(); ++c) {
        const Plane& x = a.channel(c);
        const Plane& y = b.channel(c);
        const Plane mx = filter(x, taps, exec);
        const Plane my = filter(y, taps, exec);
        const Plane sxx = filter(multiply(x, x), taps, exec);
        const Plane syy = filter(multiply(y, y), taps, exec);
        const Plane sxy = filter(multiply(x, y), taps, exec);
        for (int j = 0; j < mh; ++j) {
            for (int i = 0; i < mw; ++i) {
                const int px = i + kSsimHalf;
                const int py = j + kSsimHalf;
                const double ux = mx.at(px, py);
                const double uy = my.at(px, py);
                const double vx = sxx.at(px, py) - ux * ux;
                const double vy = syy.at(px, py) - uy * uy;
                const double cxy = sxy.at(px, py) - ux * uy;
                const double s = ((2.0 * ux * uy + kC1) * (2.0 * cxy + kC2)) /
                                 ((ux * ux + uy * uy + kC1) * (vx + vy + kC2));
                map.at(i, j) += s / a.channels();
            }
        }
    }
    return map;
}

double ssim(const Frame& a, const Frame& b, Exec exec) {
    const Plane map = ssim_map(a, b, exec);
    double sum = 0.0;
    for (double v : map.samples()) sum += v;
    return sum / static_cast<double>(map.sample_count());
}

Plane sobel_magnitude(const Plane& p) {
    Plane out(p.width(), p.height());
    const auto at = [&](int x, int y) {
        return p.at(std::clamp(x, 0, p.width() - 1), std::clamp(y, 0, p.height() - 1));
    };
    for (int y = 0; y < p.height(); ++y) {
        for (int x = 0; x < p.width(); ++x) {
            const double gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            const double gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
            out.at(x, y) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

double edge_retention(const Frame& orig, const Frame& anon, std::optional<Region> r) {
    require_same_shape(orig, anon);
    const Region region = r.value_or(Region{0, 0, orig.width(), orig.height()});
    require_inside(region, orig.size());
    const Plane go = crop(sobel_magnitude(luma(orig)), region);
    const Plane ga = crop(sobel_magnitude(luma(anon)), region);
    return pearson(go.samples(), ga.samples());
}

double contrast_retention(const Frame& orig, const Frame& anon, const Region& object, const Region& bg) {
    require_same_shape(orig, anon);
    require_inside(object, orig.size());
    require_inside(bg, orig.size());
    if (object.overlaps(bg)) throw Error(ErrorCode::OverlappingRegions, "object and background regions overlap");
    const Plane lo = luma(orig);
    const Plane la = luma(anon);
    const double before = std::abs(region_mean(lo, object) - region_mean(lo, bg));
    if (before < 1e-6) throw Error(ErrorCode::DegenerateContrast, "original object/background contrast below 1e-6");
    return std::abs(region_mean(la, object) - region_mean(la, bg)) / before;
}

MetricsReport evaluate(const Frame& orig, const Frame& anon, const NamedRegions& regions, Exec exec) {
    require_same_shape(orig, anon);
    for (const auto& [name, r] : regions) {
        if (!r.inside(orig.size())) throw Error(ErrorCode::RegionOutOfBounds, "region '" + name + "' outside frame");
    }
    MetricsReport rep;
    rep.psnr_db = psnr(orig, anon);
    const Plane map = ssim_map(orig, anon, exec);
    rep.ssim = ssim_over(map, Region{0, 0, orig.width(), orig.height()});
    rep.edge_retention = edge_retention(orig, anon);

    const auto bg = regions.find(kBackgroundRegion);
    for (const auto& [name, r] : regions) {
        RegionMetrics m;
        m.psnr_db = psnr(crop(orig, r), crop(anon, r));
        m.ssim = ssim_over(map, r);
        m.edge_retention = edge_retention(orig, anon, r);
        if (bg != regions.end() && name != kBackgroundRegion && !r.overlaps(bg->second)) {
            try {
                m.contrast_retention = contrast_retention(orig, anon, r, bg->second);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DegenerateContrast) throw;
            }
        }
        rep.per_region.emplace(name, m);
    }
    return rep;
}

MetricsReport average(const std::vector<MetricsReport>& reports) {
    if (reports.empty()) throw Error(ErrorCode::InvalidParameter, "no reports to average");
    if (reports.size() == 1) return reports.front();
    MetricsReport out = reports.front();
    const double n = static_cast<double>(reports.size());
    out.psnr_db = out.ssim = out.edge_retention = 0.0;
    for (auto& [name, m] : out.per_region) m = RegionMetrics{};
    std::map<std::string, int> contrast_count;
    for (const auto& r : reports) {
        out.psnr_db += r.psnr_db / n;
        out.ssim += r.ssim / n;
        out.edge_retention += r.edge_retention / n;
        for (const auto& [name, m] : r.per_region) {
            auto& acc = out.per_region[name];
            acc.psnr_db += m.psnr_db / n;
            acc.ssim += m.ssim / n;
            acc.edge_retention += m.edge_retention / n;
            if (m.contrast_retention) {
                acc.contrast_retention = acc.contrast_retention.value_or(0.0) + *m.contrast_retention;
                ++contrast_count[name];
            }
        }
    }
    for (auto& [name, m] : out.per_region) {
        if (m.contrast_retention) *m.contrast_retention /= contrast_count[name];
    }
    return out;
}

nlohmann::json to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["global"] = {{"psnr_db", round6(r.psnr_db)}, {"ssim", round6(r.ssim)}, {"edge_retention", round6(r.edge_retention)}};
    j["regions"] = nlohmann::json::object();
    for (const auto& [name, m] : r.per_region) {
        nlohmann::json jr = {{"psnr_db", round6(m.psnr_db)},
                             {"ssim", round6(m.ssim)},
                             {"edge_retention", round6(m.edge_retention)}};
        if (m.contrast_retention) jr["contrast_retention"] = round6(*m.contrast_retention);
        j["regions"][name] = std::move(jr);
    }
    return j;
}

NamedRegions regions_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ConfigError, "regions must be a JSON object");
    NamedRegions out;
    for (const auto& [name, v] : j.items()) {
        if (!v.is_object()) throw Error(ErrorCode::ConfigError, "region '" + name + "' must be an object");
        for (const auto& [key, unused] : v.items()) {
            if (key != "x" && key != "y" && key != "w" && key != "h") {
                throw Error(ErrorCode::ConfigError, "region '" + name + "': unknown key '" + key + "'");
            }
        }
        try {
            out[name] = Region{v.at("x").get<int>(), v.at("y").get<int>(), v.at("w").get<int>(), v.at("h").get<int>()};
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ConfigError, "region '" + name + "': " + e.what());
        }
    }
    return out;
}

nlohmann::json regions_to_json(const NamedRegions& regions) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, r] : regions) j[name] = {{"x", r.x}, {"y", r.y}, {"w", r.w}, {"h", r.h}};
    return j;
}

}  // namespace wavescrub
