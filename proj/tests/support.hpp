#pragma once

// Helpers shared by the unit tests and the acceptance runner. Everything here
// is written directly from definitions and does not call library transforms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include "wavescrub/frame.hpp"

namespace wavescrub::test {

inline Plane random_plane(std::mt19937_64& rng, int w, int h, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Plane p(w, h);
    for (auto& v : p.samples()) v = u(rng);
    return p;
}

inline Frame random_frame(std::mt19937_64& rng, int w, int h, Colorspace cs = Colorspace::RGB, double lo = 0.0,
                          double hi = 1.0) {
    std::vector<Plane> planes;
    for (int c = 0; c < channel_count(cs); ++c) planes.push_back(random_plane(rng, w, h, lo, hi));
    return Frame(cs, std::move(planes));
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double max_abs_diff(const Plane& a, const Plane& b) {
    double m = 0.0;
    auto x = a.samples();
    auto y = b.samples();
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

inline double max_abs_diff(const Frame& a, const Frame& b) {
    double m = 0.0;
    for (int c = 0; c < a.channels(); ++c) m = std::max(m, max_abs_diff(a.channel(c), b.channel(c)));
    return m;
}

/// Every pixel replaced by the mean of its k x k cell; edge cells are clipped.
inline Plane block_mean_mosaic(const Plane& p, int k) {
    Plane out(p.width(), p.height());
    for (int y0 = 0; y0 < p.height(); y0 += k) {
        for (int x0 = 0; x0 < p.width(); x0 += k) {
            const int y1 = std::min(p.height(), y0 + k);
            const int x1 = std::min(p.width(), x0 + k);
            double sum = 0.0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) sum += p.at(x, y);
            }
            const double mean = sum / ((y1 - y0) * (x1 - x0));
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) out.at(x, y) = mean;
            }
        }
    }
    return out;
}

inline Frame block_mean_mosaic(const Frame& f, int k) {
    std::vector<Plane> planes;
    for (const auto& p : f.planes()) planes.push_back(block_mean_mosaic(p, k));
    return Frame(f.colorspace(), std::move(planes));
}

/// 2x2 box average; dimensions must be even.
inline Plane boxdown2(const Plane& p) {
    Plane out(p.width() / 2, p.height() / 2);
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            out.at(x, y) = 0.25 * (p.at(2 * x, 2 * y) + p.at(2 * x + 1, 2 * y) + p.at(2 * x, 2 * y + 1) +
                                   p.at(2 * x + 1, 2 * y + 1));
        }
    }
    return out;
}

inline Frame boxdown2(const Frame& f) {
    std::vector<Plane> planes;
    for (const auto& p : f.planes()) planes.push_back(boxdown2(p));
    return Frame(f.colorspace(), std::move(planes));
}

/// Half-sample symmetric reflection: ... 2 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
inline int reflect(int i, int n) {
    const int period = 2 * n;
    int m = i % period;
    if (m < 0) m += period;
    return m < n ? m : period - 1 - m;
}

/// Dense 2D Gaussian convolution with the outer-product kernel, normalised
/// over the full square.
inline Plane dense_gaussian(const Plane& p, double sigma) {
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k2;
    double total = 0.0;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            k2.push_back(v);
            total += v;
        }
    }
    Plane out(p.width(), p.height());
    for (int y = 0; y < p.height(); ++y) {
        for (int x = 0; x < p.width(); ++x) {
            double acc = 0.0;
            std::size_t i = 0;
            for (int dy = -r; dy <= r; ++dy) {
                for (int dx = -r; dx <= r; ++dx, ++i) {
                    acc += k2[i] * p.at(reflect(x + dx, p.width()), reflect(y + dy, p.height()));
                }
            }
            out.at(x, y) = acc / total;
        }
    }
    return out;
}

/// Temporary directory removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("wavescrub_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace wavescrub::test
