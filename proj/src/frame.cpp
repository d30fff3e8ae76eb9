#include "wavescrub/frame.hpp"

#include <algorithm>
#include <string>

#include "wavescrub/error.hpp"

namespace wavescrub {

namespace {

constexpr double kWr = 0.299;
constexpr double kWg = 0.587;
constexpr double kWb = 0.114;
constexpr double kCbScale = 0.564;
constexpr double kCrScale = 0.713;

void require_colorspace(const Frame& f, Colorspace expected) {
    if (f.colorspace() != expected) {
        throw Error(ErrorCode::InvalidColorspace, "expected " + std::string(to_string(expected)) + " frame, got " +
                                                      std::string(to_string(f.colorspace())));
    }
}

}  // namespace

std::string_view to_string(Colorspace cs) noexcept {
    switch (cs) {
    case Colorspace::Gray: return "gray";
    case Colorspace::RGB: return "rgb";
    case Colorspace::YCbCr: return "ycbcr";
    }
    return "unknown";
}

int channel_count(Colorspace cs) noexcept { return cs == Colorspace::Gray ? 1 : 3; }

Plane::Plane(int width, int height, double fill)
    : width_(width), height_(height), data_(static_cast<std::size_t>(width) * height, fill) {
    if (width < 0 || height < 0) throw Error(ErrorCode::EmptyPlane, "negative plane dimensions");
}

Plane::Plane(int width, int height, std::vector<double> data) : width_(width), height_(height), data_(std::move(data)) {
    if (width < 0 || height < 0 || data_.size() != static_cast<std::size_t>(width) * height) {
        throw Error(ErrorCode::DimMismatch, "plane data length does not match " + std::to_string(width) + "x" +
                                                std::to_string(height));
    }
}

Frame::Frame(int width, int height, Colorspace cs, double fill) : width_(width), height_(height), colorspace_(cs) {
    if (width < 1 || height < 1) throw Error(ErrorCode::EmptyPlane, "frame dimensions must be >= 1");
    planes_.assign(static_cast<std::size_t>(channel_count(cs)), Plane(width, height, fill));
}

Frame::Frame(Colorspace cs, std::vector<Plane> channels) : colorspace_(cs), planes_(std::move(channels)) {
    if (static_cast<int>(planes_.size()) != channel_count(cs)) {
        throw Error(ErrorCode::InvalidColorspace, "channel count does not match colorspace");
    }
    width_ = planes_.front().width();
    height_ = planes_.front().height();
    if (width_ < 1 || height_ < 1) throw Error(ErrorCode::EmptyPlane, "frame dimensions must be >= 1");
    for (const auto& p : planes_) {
        if (p.size() != size()) throw Error(ErrorCode::DimMismatch, "channel planes differ in size");
    }
}

Frame rgb_to_ycbcr(const Frame& f) {
    require_colorspace(f, Colorspace::RGB);
    Frame out(f.width(), f.height(), Colorspace::YCbCr);
    auto r = f.channel(0).samples();
    auto g = f.channel(1).samples();
    auto b = f.channel(2).samples();
    auto y = out.channel(0).samples();
    auto cb = out.channel(1).samples();
    auto cr = out.channel(2).samples();
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double luma = kWr * r[i] + kWg * g[i] + kWb * b[i];
        y[i] = luma;
        cb[i] = 0.5 + (b[i] - luma) * kCbScale;
        cr[i] = 0.5 + (r[i] - luma) * kCrScale;
    }
    return out;
}

Frame ycbcr_to_rgb(const Frame& f) {
    require_colorspace(f, Colorspace::YCbCr);
    Frame out(f.width(), f.height(), Colorspace::RGB);
    auto y = f.channel(0).samples();
    auto cb = f.channel(1).samples();
    auto cr = f.channel(2).samples();
    auto r = out.channel(0).samples();
    auto g = out.channel(1).samples();
    auto b = out.channel(2).samples();
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double red = y[i] + (cr[i] - 0.5) / kCrScale;
        const double blue = y[i] + (cb[i] - 0.5) / kCbScale;
        const double green = (y[i] - kWr * red - kWb * blue) / kWg;
        r[i] = std::clamp(red, 0.0, 1.0);
        g[i] = std::clamp(green, 0.0, 1.0);
        b[i] = std::clamp(blue, 0.0, 1.0);
    }
    return out;
}

Plane crop(const Plane& p, const Region& r) {
    if (!r.inside(p.size())) {
        throw Error(ErrorCode::RegionOutOfBounds,
                    "region (" + std::to_string(r.x) + "," + std::to_string(r.y) + "," + std::to_string(r.w) + "," +
                        std::to_string(r.h) + ") outside " + std::to_string(p.width()) + "x" +
                        std::to_string(p.height()));
    }
    Plane out(r.w, r.h);
    for (int y = 0; y < r.h; ++y) {
        auto src = p.row(r.y + y).subspan(static_cast<std::size_t>(r.x), static_cast<std::size_t>(r.w));
        std::copy(src.begin(), src.end(), out.row(y).begin());
    }
    return out;
}

Frame crop(const Frame& f, const Region& r) {
    std::vector<Plane> planes;
    planes.reserve(f.planes().size());
    for (const auto& p : f.planes()) planes.push_back(crop(p, r));
    return Frame(f.colorspace(), std::move(planes));
}

Plane luma(const Frame& f) {
    if (f.colorspace() != Colorspace::RGB) return f.channel(0);
    Plane out(f.width(), f.height());
    auto r = f.channel(0).samples();
    auto g = f.channel(1).samples();
    auto b = f.channel(2).samples();
    auto y = out.samples();
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = kWr * r[i] + kWg * g[i] + kWb * b[i];
    return out;
}

void clamp_unit(Frame& f) noexcept {
    for (auto& p : f.planes()) {
        for (auto& v : p.samples()) v = std::clamp(v, 0.0, 1.0);
    }
}

void require_same_shape(const Frame& a, const Frame& b) {
    if (a.size() != b.size() || a.colorspace() != b.colorspace()) {
        throw Error(ErrorCode::DimMismatch, std::to_string(a.width()) + "x" + std::to_string(a.height()) + " " +
                                                std::string(to_string(a.colorspace())) + " vs " +
                                                std::to_string(b.width()) + "x" + std::to_string(b.height()) + " " +
                                                std::string(to_string(b.colorspace())));
    }
}

}  // namespace wavescrub
