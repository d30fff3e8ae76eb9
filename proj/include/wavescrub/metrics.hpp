#pragma once

#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "wavescrub/exec.hpp"
#include "wavescrub/frame.hpp"

namespace wavescrub {

inline constexpr double kPsnrCap = 99.0;

using NamedRegions = std::map<std::string, Region>;

/// 10 log10(1 / MSE) over every sample of every channel; identical inputs give kPsnrCap.
double psnr(const Frame& a, const Frame& b);

/// Local SSIM on each window position whose 11x11 Gaussian window (sigma 1.5)
/// lies fully inside the frame, averaged over channels. Map pixel (i, j) is
/// the window centred at (i + 5, j + 5).
Plane ssim_map(const Frame& a, const Frame& b, Exec exec = Exec::Parallel);

/// Mean of ssim_map; both frames need min dimension >= 11.
double ssim(const Frame& a, const Frame& b, Exec exec = Exec::Parallel);

/// Sobel magnitude on the luma plane, replicated borders.
Plane sobel_magnitude(const Plane& p);

/// Pearson correlation of Sobel magnitudes of luma(orig) and luma(anon)
/// over `r` (default whole frame), clamped to [0,1].
double edge_retention(const Frame& orig, const Frame& anon, std::optional<Region> r = std::nullopt);

/// |mean(anon, object) - mean(anon, bg)| / |mean(orig, object) - mean(orig, bg)| on luma.
double contrast_retention(const Frame& orig, const Frame& anon, const Region& object, const Region& bg);

struct RegionMetrics {
    double psnr_db = 0.0;
    /// Mean of the SSIM windows centred inside the region, or of the nearest
    /// full windows when it hugs the border.
    double ssim = 0.0;
    double edge_retention = 0.0;
    /// Against the "background" region; absent for the background itself,
    /// for regions overlapping it, and where the original contrast vanishes.
    std::optional<double> contrast_retention;
};

struct MetricsReport {
    double psnr_db = 0.0;
    double ssim = 0.0;
    double edge_retention = 0.0;
    std::map<std::string, RegionMetrics> per_region;
};

inline constexpr const char* kBackgroundRegion = "background";

MetricsReport evaluate(const Frame& orig, const Frame& anon, const NamedRegions& regions = {},
                       Exec exec = Exec::Parallel);

/// Element-wise mean of several reports (e.g. one per video frame).
MetricsReport average(const std::vector<MetricsReport>& reports);

/// Values rounded to 6 decimals:
/// {"global": {...}, "regions": {"name": {...}}}.
nlohmann::json to_json(const MetricsReport& r);
double round6(double v);

NamedRegions regions_from_json(const nlohmann::json& j);
nlohmann::json regions_to_json(const NamedRegions& regions);

}  // namespace wavescrub
