#include "wavescrub/scene.hpp"

#include <random>
#include <string>

#include "wavescrub/error.hpp"

namespace wavescrub {

namespace {

constexpr double kBackground = 0.5;
// Warm tint shared by both figures.
constexpr double kFigureCb = 0.46;
constexpr double kFigureCr = 0.56;

void paint_figure(Frame& ycc, const Region& r, double mean_luma, double amplitude) {
    for (int y = r.y; y < r.y + r.h; ++y) {
        for (int x = r.x; x < r.x + r.w; ++x) {
            const bool bright = ((x - r.x) / 2) % 2 == 0;
            ycc.channel(0).at(x, y) = mean_luma + (bright ? amplitude : -amplitude);
            ycc.channel(1).at(x, y) = kFigureCb;
            ycc.channel(2).at(x, y) = kFigureCr;
        }
    }
}

}  // namespace

Scene make_near_far_scene(const SceneParams& p) {
    if (p.width < 128 || p.height < 128 || p.width % 2 != 0 || p.height % 2 != 0) {
        throw Error(ErrorCode::SceneTooSmall, "scene needs even dimensions >= 128, got " + std::to_string(p.width) +
                                                  "x" + std::to_string(p.height));
    }
    const double mean = kBackground + p.figure_contrast;
    if (mean + p.stripe_amplitude > 1.0 || mean - p.stripe_amplitude < 0.0 || p.stripe_amplitude < 0.0) {
        throw Error(ErrorCode::InvalidParameter, "figure luma would leave [0,1]");
    }

    Scene s;
    s.regions["near_figure"] = {p.width / 8, (p.height - kNearFigureHeight) / 2, kNearFigureWidth, kNearFigureHeight};
    s.regions["far_figure"] = {p.width * 200 / 256, p.height * 120 / 256, kFarFigureWidth, kFarFigureHeight};
    s.regions["background"] = {p.width - p.width / 4, p.height / 16, p.width / 8, p.height / 8};

    Frame ycc(p.width, p.height, Colorspace::YCbCr, 0.5);
    for (auto& v : ycc.channel(0).samples()) v = kBackground;
    paint_figure(ycc, s.regions["near_figure"], mean, p.stripe_amplitude);
    paint_figure(ycc, s.regions["far_figure"], mean, p.stripe_amplitude);
    s.frame = ycbcr_to_rgb(ycc);

    if (p.noise > 0.0) {
        // Raw engine bits keep the noise identical across standard libraries.
        std::mt19937_64 rng(p.seed);
        for (auto& plane : s.frame.planes()) {
            for (auto& v : plane.samples()) {
                const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
                v += (2.0 * u - 1.0) * p.noise;
            }
        }
        clamp_unit(s.frame);
    }
    return s;
}

}  // namespace wavescrub
