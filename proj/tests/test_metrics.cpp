#include <doctest.h>

#include "support.hpp"
#include "wavescrub/baselines.hpp"
#include "wavescrub/error.hpp"
#include "wavescrub/metrics.hpp"

using namespace wavescrub;
using namespace wavescrub::test;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return ErrorCode::IoError;
}

// Windowed SSIM evaluated directly: 2D Gaussian weights over each full
// 11x11 window, averaged over windows and channels.
double reference_ssim(const Frame& a, const Frame& b) {
    double w[11][11];
    double total = 0.0;
    for (int dy = -5; dy <= 5; ++dy) {
        for (int dx = -5; dx <= 5; ++dx) {
            w[dy + 5][dx + 5] = std::exp(-(dx * dx + dy * dy) / (2 * 1.5 * 1.5));
            total += w[dy + 5][dx + 5];
        }
    }
    const double c1 = 1e-4, c2 = 9e-4;
    double sum = 0.0;
    int count = 0;
    for (int cy = 5; cy < a.height() - 5; ++cy) {
        for (int cx = 5; cx < a.width() - 5; ++cx) {
            double s = 0.0;
            for (int c = 0; c < a.channels(); ++c) {
                double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
                for (int dy = -5; dy <= 5; ++dy) {
                    for (int dx = -5; dx <= 5; ++dx) {
                        const double k = w[dy + 5][dx + 5] / total;
                        const double x = a.channel(c).at(cx + dx, cy + dy);
                        const double y = b.channel(c).at(cx + dx, cy + dy);
                        mx += k * x;
                        my += k * y;
                        xx += k * x * x;
                        yy += k * y * y;
                        xy += k * x * y;
                    }
                }
                const double vx = xx - mx * mx, vy = yy - my * my, cov = xy - mx * my;
                s += (2 * mx * my + c1) * (2 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            }
            sum += s / a.channels();
            ++count;
        }
    }
    return sum / count;
}

Frame flip(const Frame& f) {
    Frame out = f;
    for (int c = 0; c < f.channels(); ++c) {
        for (int y = 0; y < f.height(); ++y) {
            for (int x = 0; x < f.width(); ++x) out.channel(c).at(x, y) = f.channel(c).at(f.width() - 1 - x, y);
        }
    }
    return out;
}

Frame add_noise(const Frame& f, double amp, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-amp, amp);
    Frame out = f;
    for (auto& p : out.planes()) {
        for (auto& v : p.samples()) v += u(rng);
    }
    return out;
}

Frame checkerboard(int w, int h) {
    Frame f(w, h, Colorspace::Gray);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) f.channel(0).at(x, y) = ((x / 2 + y / 2) % 2) ? 1.0 : 0.0;
    }
    return f;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("psnr") {
    std::mt19937_64 rng(1);
    const Frame a = random_frame(rng, 20, 17);
    CHECK(psnr(a, a) == kPsnrCap);
    Frame b = a;
    for (auto& p : b.planes()) {
        for (auto& v : p.samples()) v += 1.0 / 255.0;
    }
    CHECK(std::abs(psnr(a, b) - 20.0 * std::log10(255.0)) <= 0.01);
    const Frame c = random_frame(rng, 20, 17);
    CHECK(psnr(a, c) == psnr(c, a));
    CHECK(code_of([&] { psnr(a, random_frame(rng, 20, 16)); }) == ErrorCode::DimMismatch);
    CHECK(code_of([&] { psnr(a, Frame(20, 17, Colorspace::YCbCr)); }) == ErrorCode::DimMismatch);
}

TEST_CASE("psnr falls as noise grows") {
    std::mt19937_64 rng(2);
    const Frame f = random_frame(rng, 64, 64, Colorspace::RGB, 0.2, 0.8);
    double prev = kPsnrCap;
    for (double amp : {0.01, 0.05, 0.2}) {
        const double q = psnr(f, add_noise(f, amp, rng));
        CHECK(q < prev);
        prev = q;
    }
}

TEST_CASE("ssim against the direct window evaluation") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 3; ++trial) {
        const Frame a = random_frame(rng, uniform_int(rng, 11, 30), uniform_int(rng, 11, 30));
        const Frame b = add_noise(a, 0.1, rng);
        CHECK(std::abs(ssim(a, b) - reference_ssim(a, b)) <= 1e-9);
    }
}

TEST_CASE("ssim identities") {
    std::mt19937_64 rng(4);
    const Frame a = random_frame(rng, 32, 24);
    const Frame b = random_frame(rng, 32, 24);
    CHECK(std::abs(ssim(a, a) - 1.0) <= 1e-9);
    CHECK(std::abs(ssim(a, b) - ssim(b, a)) <= 1e-9);
    CHECK(ssim_map(a, b).size() == Size{22, 14});
    CHECK(code_of([&] { ssim(Frame(10, 30, Colorspace::RGB), Frame(10, 30, Colorspace::RGB)); }) ==
          ErrorCode::FrameTooSmall);
    CHECK(ssim(a, b, Exec::Serial) == ssim(a, b, Exec::Parallel));
}

TEST_CASE("ssim of an inverted checkerboard is negative") {
    const Frame f = checkerboard(24, 24);
    Frame inv = f;
    for (auto& v : inv.channel(0).samples()) v = 1.0 - v;
    const double s = ssim(f, inv);
    CHECK(s >= -1.0);
    CHECK(s < 0.0);
    CHECK(std::abs(s - reference_ssim(f, inv)) <= 1e-9);
}

TEST_CASE("ssim prefers a blur to a flat mean") {
    std::mt19937_64 rng(5);
    Frame f(48, 48, Colorspace::Gray);
    for (int y = 0; y < 48; ++y) {
        for (int x = 0; x < 48; ++x) f.channel(0).at(x, y) = 0.5 + 0.3 * std::sin(x * 0.7) * std::cos(y * 0.4);
    }
    f = add_noise(f, 0.05, rng);
    double mean = 0.0;
    for (double v : f.channel(0).samples()) mean += v;
    mean /= 48.0 * 48.0;
    const Frame flat(48, 48, Colorspace::Gray, mean);
    CHECK(ssim(f, flat) < ssim(f, gaussian_blur(f, {1.0})));
}

TEST_CASE("edge retention") {
    std::mt19937_64 rng(6);
    const Frame f = random_frame(rng, 30, 30);
    CHECK(edge_retention(f, f) == doctest::Approx(1.0));
    CHECK(edge_retention(f, Frame(30, 30, Colorspace::RGB, 0.5)) == 0.0);
    const Frame flat(30, 30, Colorspace::RGB, 0.2);
    CHECK(edge_retention(flat, Frame(30, 30, Colorspace::RGB, 0.7)) == 1.0);
    CHECK(edge_retention(flat, f) == 0.0);
    const double e = edge_retention(f, gaussian_blur(f, {1.0}), Region{5, 5, 10, 10});
    CHECK(e >= 0.0);
    CHECK(e <= 1.0);
    CHECK(code_of([&] { edge_retention(f, f, Region{25, 25, 10, 10}); }) == ErrorCode::RegionOutOfBounds);

    // Sobel of a vertical step is nonzero only next to the step.
    Plane step(8, 4, 0.0);
    for (int y = 0; y < 4; ++y) {
        for (int x = 4; x < 8; ++x) step.at(x, y) = 1.0;
    }
    const Plane g = sobel_magnitude(step);
    CHECK(g.at(3, 1) == doctest::Approx(4.0));
    CHECK(g.at(4, 1) == doctest::Approx(4.0));
    CHECK(g.at(1, 1) == 0.0);
    CHECK(g.at(6, 1) == 0.0);
}

TEST_CASE("contrast retention") {
    Frame f(32, 32, Colorspace::RGB, 0.2);
    for (int c = 0; c < 3; ++c) {
        for (int y = 8; y < 16; ++y) {
            for (int x = 16; x < 24; ++x) f.channel(c).at(x, y) = 0.9;
        }
    }
    const Region obj{16, 8, 8, 8};
    const Region bg{0, 24, 32, 8};
    CHECK(contrast_retention(f, f, obj, bg) == doctest::Approx(1.0));
    CHECK(contrast_retention(f, Frame(32, 32, Colorspace::RGB, 0.4), obj, bg) <= 1e-12);
    CHECK(std::abs(contrast_retention(f, downsample_anonymize(f, {8}), obj, bg) - 1.0) <= 1e-6);
    CHECK(code_of([&] { contrast_retention(f, f, obj, Region{20, 10, 8, 8}); }) == ErrorCode::OverlappingRegions);
    const Frame flat(32, 32, Colorspace::RGB, 0.5);
    CHECK(code_of([&] { contrast_retention(flat, flat, obj, bg); }) == ErrorCode::DegenerateContrast);
}

TEST_CASE("metrics are flip invariant") {
    std::mt19937_64 rng(7);
    const Frame a = random_frame(rng, 40, 30);
    const Frame b = gaussian_blur(a, {1.5});
    CHECK(psnr(flip(a), flip(b)) == doctest::Approx(psnr(a, b)).epsilon(1e-12));
    CHECK(std::abs(ssim(flip(a), flip(b)) - ssim(a, b)) <= 1e-9);
    CHECK(std::abs(edge_retention(flip(a), flip(b)) - edge_retention(a, b)) <= 1e-9);
    const Region obj{5, 5, 10, 10};
    const Region obj_f{40 - 15, 5, 10, 10};
    const Region bg{0, 20, 40, 10};
    CHECK(std::abs(contrast_retention(flip(a), flip(b), obj_f, bg) - contrast_retention(a, b, obj, bg)) <= 1e-9);
}

TEST_CASE("evaluate and report") {
    std::mt19937_64 rng(8);
    const Frame a = random_frame(rng, 48, 40);
    const Frame b = gaussian_blur(a, {1.0});
    const NamedRegions regions = {{"background", {0, 0, 48, 12}}, {"thing", {10, 20, 16, 16}}, {"edge", {0, 5, 4, 10}}};
    const MetricsReport r = evaluate(a, b, regions);
    CHECK(r.psnr_db == doctest::Approx(psnr(a, b)));
    CHECK(r.ssim == doctest::Approx(ssim(a, b)));
    CHECK(r.per_region.at("thing").psnr_db == doctest::Approx(psnr(crop(a, {10, 20, 16, 16}), crop(b, {10, 20, 16, 16}))));
    CHECK(r.per_region.at("thing").contrast_retention.has_value());
    CHECK_FALSE(r.per_region.at("background").contrast_retention.has_value());
    CHECK_FALSE(r.per_region.at("edge").contrast_retention.has_value());
    // Too close to the border for a centred window: uses the nearest ones.
    const Plane map = ssim_map(a, b);
    double first_column = 0.0;
    for (int y = 0; y < 10; ++y) first_column += map.at(0, y);
    CHECK(r.per_region.at("edge").ssim == doctest::Approx(first_column / 10));

    const json j = to_json(r);
    CHECK(j.at("global").at("psnr_db").get<double>() == doctest::Approx(round6(r.psnr_db)));
    CHECK(j.at("regions").contains("thing"));
    CHECK(round6(1.23456789) == 1.234568);

    const MetricsReport avg = average({r, evaluate(a, a, regions)});
    CHECK(avg.psnr_db == doctest::Approx((r.psnr_db + kPsnrCap) / 2));
    CHECK(code_of([&] { evaluate(a, b, {{"out", {40, 30, 10, 20}}}); }) == ErrorCode::RegionOutOfBounds);
}

TEST_CASE("regions json") {
    const json good = {{"far_figure", {{"x", 200}, {"y", 120}, {"w", 8}, {"h", 12}}}};
    const NamedRegions r = regions_from_json(good);
    CHECK(r.at("far_figure") == Region{200, 120, 8, 12});
    CHECK(regions_to_json(r) == good);
    CHECK(code_of([] { regions_from_json(json::array()); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { regions_from_json({{"a", {{"x", 1}, {"y", 1}, {"w", 1}}}}); }) == ErrorCode::ConfigError);
    CHECK(code_of([] { regions_from_json({{"a", {{"x", 1}, {"y", 1}, {"w", 1}, {"h", 1}, {"z", 0}}}}); }) ==
          ErrorCode::ConfigError);
    CHECK(code_of([] { regions_from_json({{"a", {{"x", "1"}, {"y", 1}, {"w", 1}, {"h", 1}}}}); }) ==
          ErrorCode::ConfigError);
}

}
