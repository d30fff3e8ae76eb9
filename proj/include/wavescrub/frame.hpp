#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace wavescrub {

enum class Colorspace { Gray, RGB, YCbCr };

std::string_view to_string(Colorspace cs) noexcept;
int channel_count(Colorspace cs) noexcept;

struct Size {
    int width = 0;
    int height = 0;

    friend bool operator==(const Size&, const Size&) = default;
};

/// Row-major plane of real samples.
class Plane {
public:
    Plane() = default;
    Plane(int width, int height, double fill = 0.0);
    Plane(int width, int height, std::vector<double> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    Size size() const noexcept { return {width_, height_}; }
    std::size_t sample_count() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& at(int x, int y) noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double at(int x, int y) const noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<double> row(int y) noexcept {
        return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
    }
    std::span<const double> row(int y) const noexcept {
        return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
    }

    std::span<double> samples() noexcept { return data_; }
    std::span<const double> samples() const noexcept { return data_; }

    friend bool operator==(const Plane&, const Plane&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Pixel rectangle; `x`,`y` is the top-left corner.
struct Region {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    bool inside(Size s) const noexcept {
        return x >= 0 && y >= 0 && w >= 1 && h >= 1 && x + w <= s.width && y + h <= s.height;
    }
    bool overlaps(const Region& o) const noexcept {
        return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
    }
    /// Region `inner` expressed relative to this one, mapped back to the parent frame.
    Region compose(const Region& inner) const noexcept { return {x + inner.x, y + inner.y, inner.w, inner.h}; }

    friend bool operator==(const Region&, const Region&) = default;
};

/// Planar image. Samples are unit-scale reals; values outside [0,1] are
/// legal while processing and are clamped only at I/O boundaries.
class Frame {
public:
    Frame() = default;
    Frame(int width, int height, Colorspace cs, double fill = 0.0);
    Frame(Colorspace cs, std::vector<Plane> channels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    Size size() const noexcept { return {width_, height_}; }
    Colorspace colorspace() const noexcept { return colorspace_; }
    int channels() const noexcept { return static_cast<int>(planes_.size()); }

    Plane& channel(int c) noexcept { return planes_[static_cast<std::size_t>(c)]; }
    const Plane& channel(int c) const noexcept { return planes_[static_cast<std::size_t>(c)]; }
    std::vector<Plane>& planes() noexcept { return planes_; }
    const std::vector<Plane>& planes() const noexcept { return planes_; }

    friend bool operator==(const Frame&, const Frame&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    Colorspace colorspace_ = Colorspace::Gray;
    std::vector<Plane> planes_;
};

// BT.601 full range.
Frame rgb_to_ycbcr(const Frame& f);
Frame ycbcr_to_rgb(const Frame& f);

Frame crop(const Frame& f, const Region& r);
Plane crop(const Plane& p, const Region& r);

/// Luma plane: channel 0 for Gray/YCbCr, BT.601 weighted sum for RGB.
Plane luma(const Frame& f);

void clamp_unit(Frame& f) noexcept;
void require_same_shape(const Frame& a, const Frame& b);

}  // namespace wavescrub
