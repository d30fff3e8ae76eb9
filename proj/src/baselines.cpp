#include "wavescrub/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "wavescrub/error.hpp"
#include "wavescrub/kernels.hpp"

namespace wavescrub {

int GaussianParams::radius() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error(ErrorCode::InvalidSigma, "sigma must be > 0");
    return static_cast<int>(std::ceil(3.0 * sigma));
}

std::vector<double> gaussian_kernel(const GaussianParams& p) {
    const int r = p.radius();
    std::vector<double> taps(static_cast<std::size_t>(2 * r + 1));
    const double denom = 2.0 * p.sigma * p.sigma;
    for (int i = -r; i <= r; ++i) taps[static_cast<std::size_t>(i + r)] = std::exp(-(i * i) / denom);
    const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
    for (auto& t : taps) t /= sum;
    return taps;
}

Frame gaussian_blur(const Frame& f, const GaussianParams& p, Exec exec) {
    const auto taps = gaussian_kernel(p);
    Frame out = f;
    Plane tmp;
    for (int c = 0; c < f.channels(); ++c) {
        kernels::convolve_rows(exec, f.channel(c), taps, tmp);
        kernels::convolve_cols(exec, tmp, taps, out.channel(c));
    }
    return out;
}

Frame downsample_anonymize(const Frame& f, const DownsampleParams& p) {
    if (p.factor < 2 || p.factor > std::min(f.width(), f.height())) {
        throw Error(ErrorCode::InvalidFactor, "factor " + std::to_string(p.factor) + " outside 2.." +
                                                  std::to_string(std::min(f.width(), f.height())));
    }
    Frame out = f;
    const int k = p.factor;
    for (int c = 0; c < f.channels(); ++c) {
        const Plane& src = f.channel(c);
        Plane& dst = out.channel(c);
        for (int y0 = 0; y0 < f.height(); y0 += k) {
            const int y1 = std::min(f.height(), y0 + k);
            for (int x0 = 0; x0 < f.width(); x0 += k) {
                const int x1 = std::min(f.width(), x0 + k);
                double sum = 0.0;
                double lo = src.at(x0, y0);
                double hi = lo;
                for (int y = y0; y < y1; ++y) {
                    for (int x = x0; x < x1; ++x) {
                        sum += src.at(x, y);
                        lo = std::min(lo, src.at(x, y));
                        hi = std::max(hi, src.at(x, y));
                    }
                }
                // The clamp makes flat cells reproduce their value exactly,
                // so a second pass changes nothing.
                const double mean = std::clamp(sum / static_cast<double>((y1 - y0) * (x1 - x0)), lo, hi);
                for (int y = y0; y < y1; ++y) {
                    for (int x = x0; x < x1; ++x) dst.at(x, y) = mean;
                }
            }
        }
    }
    return out;
}

namespace {

using kernels::ClusterCenter;

double gradient_at(const Frame& f, int x, int y) {
    const int xl = std::max(0, x - 1);
    const int xr = std::min(f.width() - 1, x + 1);
    const int yu = std::max(0, y - 1);
    const int yd = std::min(f.height() - 1, y + 1);
    double g = 0.0;
    for (const auto& p : f.planes()) {
        const double dx = p.at(xr, y) - p.at(xl, y);
        const double dy = p.at(x, yd) - p.at(x, yu);
        g += dx * dx + dy * dy;
    }
    return g;
}

ClusterCenter center_at(const Frame& f, int x, int y) {
    ClusterCenter c;
    c.x = x;
    c.y = y;
    for (int ch = 0; ch < f.channels(); ++ch) c.color[ch] = f.channel(ch).at(x, y);
    return c;
}

struct Grid {
    int nx;
    int ny;
};

Grid seed_grid(Size s, int segments) {
    const double aspect = static_cast<double>(s.width) / s.height;
    const int nx = std::clamp(static_cast<int>(std::lround(std::sqrt(segments * aspect))), 1, s.width);
    const int ny = std::clamp(static_cast<int>(std::lround(static_cast<double>(segments) / nx)), 1, s.height);
    return {nx, ny};
}

// Seeds on a regular grid, each moved to the lowest-gradient pixel of its
// 3x3 neighbourhood (first minimum in row-major order).
std::vector<ClusterCenter> seed_centers(const Frame& f, Grid g, std::vector<int>& labels) {
    std::vector<ClusterCenter> centers;
    centers.reserve(static_cast<std::size_t>(g.nx) * g.ny);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const int cx = static_cast<int>((i + 0.5) * f.width() / g.nx);
            const int cy = static_cast<int>((j + 0.5) * f.height() / g.ny);
            int bx = cx;
            int by = cy;
            double best = gradient_at(f, cx, cy);
            for (int y = std::max(0, cy - 1); y <= std::min(f.height() - 1, cy + 1); ++y) {
                for (int x = std::max(0, cx - 1); x <= std::min(f.width() - 1, cx + 1); ++x) {
                    const double gr = gradient_at(f, x, y);
                    if (gr < best) {
                        best = gr;
                        bx = x;
                        by = y;
                    }
                }
            }
            centers.push_back(center_at(f, bx, by));
        }
    }
    for (int y = 0; y < f.height(); ++y) {
        const int j = std::min(g.ny - 1, y * g.ny / f.height());
        for (int x = 0; x < f.width(); ++x) {
            const int i = std::min(g.nx - 1, x * g.nx / f.width());
            labels[static_cast<std::size_t>(y) * f.width() + x] = j * g.nx + i;
        }
    }
    return centers;
}

void update_centers(const Frame& f, const std::vector<int>& labels, std::vector<ClusterCenter>& centers) {
    const std::size_t k = centers.size();
    std::vector<double> sx(k, 0.0), sy(k, 0.0), sc(k * 3, 0.0);
    std::vector<long> count(k, 0);
    for (int y = 0; y < f.height(); ++y) {
        for (int x = 0; x < f.width(); ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * f.width() + x;
            const auto l = static_cast<std::size_t>(labels[idx]);
            sx[l] += x;
            sy[l] += y;
            for (int ch = 0; ch < f.channels(); ++ch) sc[l * 3 + ch] += f.channel(ch).samples()[idx];
            ++count[l];
        }
    }
    for (std::size_t l = 0; l < k; ++l) {
        if (count[l] == 0) continue;
        const double n = static_cast<double>(count[l]);
        centers[l].x = sx[l] / n;
        centers[l].y = sy[l] / n;
        for (int ch = 0; ch < f.channels(); ++ch) centers[l].color[ch] = sc[l * 3 + ch] / n;
    }
}

// Splits every label into 4-connected components. The largest component of
// each label keeps it; the others are absorbed into the largest adjacent
// segment. Output labels are renumbered in row-major first-appearance order.
int enforce_connectivity(int width, int height, std::vector<int>& labels) {
    const std::size_t n = labels.size();
    std::vector<int> comp(n, -1);
    std::vector<std::vector<std::size_t>> members;
    std::vector<int> comp_label;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (comp[start] >= 0) continue;
        const int id = static_cast<int>(members.size());
        const int label = labels[start];
        members.emplace_back();
        comp_label.push_back(label);
        comp[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t idx = stack.back();
            stack.pop_back();
            members.back().push_back(idx);
            const int x = static_cast<int>(idx % width);
            const int y = static_cast<int>(idx / width);
            const std::size_t nb[4] = {idx - 1, idx + 1, idx - width, idx + width};
            const bool valid[4] = {x > 0, x + 1 < width, y > 0, y + 1 < height};
            for (int k = 0; k < 4; ++k) {
                if (valid[k] && comp[nb[k]] < 0 && labels[nb[k]] == label) {
                    comp[nb[k]] = id;
                    stack.push_back(nb[k]);
                }
            }
        }
    }

    const int comps = static_cast<int>(members.size());
    std::vector<int> keeper;  // per original label: kept component id
    for (int c = 0; c < comps; ++c) {
        const auto l = static_cast<std::size_t>(comp_label[static_cast<std::size_t>(c)]);
        if (l >= keeper.size()) keeper.resize(l + 1, -1);
        const int cur = keeper[l];
        if (cur < 0 || members[static_cast<std::size_t>(c)].size() > members[static_cast<std::size_t>(cur)].size()) {
            keeper[l] = c;
        }
    }

    std::vector<int> parent(static_cast<std::size_t>(comps));
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<std::size_t> weight(static_cast<std::size_t>(comps));
    for (int c = 0; c < comps; ++c) weight[static_cast<std::size_t>(c)] = members[static_cast<std::size_t>(c)].size();
    const auto find = [&](int c) {
        while (parent[static_cast<std::size_t>(c)] != c) {
            parent[static_cast<std::size_t>(c)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(c)])];
            c = parent[static_cast<std::size_t>(c)];
        }
        return c;
    };

    for (int c = 0; c < comps; ++c) {
        if (keeper[static_cast<std::size_t>(comp_label[static_cast<std::size_t>(c)])] == c) continue;
        int target = -1;
        for (std::size_t idx : members[static_cast<std::size_t>(c)]) {
            const int x = static_cast<int>(idx % width);
            const int y = static_cast<int>(idx / width);
            const std::size_t nb[4] = {idx - 1, idx + 1, idx - width, idx + width};
            const bool valid[4] = {x > 0, x + 1 < width, y > 0, y + 1 < height};
            for (int k = 0; k < 4; ++k) {
                if (!valid[k]) continue;
                const int r = find(comp[nb[k]]);
                if (r == c) continue;
                if (target < 0 || weight[static_cast<std::size_t>(r)] > weight[static_cast<std::size_t>(target)] ||
                    (weight[static_cast<std::size_t>(r)] == weight[static_cast<std::size_t>(target)] && r < target)) {
                    target = r;
                }
            }
        }
        if (target < 0) continue;  // single component covering the frame
        parent[static_cast<std::size_t>(c)] = target;
        weight[static_cast<std::size_t>(target)] += weight[static_cast<std::size_t>(c)];
    }

    std::vector<int> renumber(static_cast<std::size_t>(comps), -1);
    int next = 0;
    for (std::size_t idx = 0; idx < n; ++idx) {
        const int root = find(comp[idx]);
        int& slot = renumber[static_cast<std::size_t>(root)];
        if (slot < 0) slot = next++;
        labels[idx] = slot;
    }
    return next;
}

}  // namespace

Segmentation slic_segment(const Frame& f, const SlicParams& p, Exec exec) {
    const long pixels = static_cast<long>(f.width()) * f.height();
    if (p.segments > pixels) {
        throw Error(ErrorCode::TooManySegments,
                    std::to_string(p.segments) + " segments for " + std::to_string(pixels) + " pixels");
    }
    if (p.segments < 2) throw Error(ErrorCode::InvalidParameter, "segments must be >= 2");
    if (!(p.compactness > 0.0) || !std::isfinite(p.compactness)) {
        throw Error(ErrorCode::InvalidParameter, "compactness must be > 0");
    }
    if (p.iterations < 0) throw Error(ErrorCode::InvalidParameter, "iterations must be >= 0");

    Segmentation seg;
    seg.width = f.width();
    seg.height = f.height();
    seg.labels.assign(static_cast<std::size_t>(pixels), 0);

    const kernels::SlicGeometry geom{std::sqrt(static_cast<double>(pixels) / p.segments), p.compactness};
    auto centers = seed_centers(f, seed_grid(f.size(), p.segments), seg.labels);
    for (int it = 0; it < p.iterations; ++it) {
        kernels::slic_assign(exec, f, centers, geom, seg.labels);
        update_centers(f, seg.labels, centers);
    }
    seg.count = enforce_connectivity(f.width(), f.height(), seg.labels);
    return seg;
}

Frame fill_segments(const Frame& f, const Segmentation& seg) {
    if (seg.width != f.width() || seg.height != f.height()) {
        throw Error(ErrorCode::DimMismatch, "segmentation does not match frame");
    }
    Frame out = f;
    const auto k = static_cast<std::size_t>(seg.count);
    std::vector<long> count(k, 0);
    for (int l : seg.labels) ++count[static_cast<std::size_t>(l)];
    for (int c = 0; c < f.channels(); ++c) {
        std::vector<double> sum(k, 0.0);
        std::vector<double> lo(k, std::numeric_limits<double>::infinity());
        std::vector<double> hi(k, -std::numeric_limits<double>::infinity());
        const auto src = f.channel(c).samples();
        for (std::size_t i = 0; i < src.size(); ++i) {
            const auto l = static_cast<std::size_t>(seg.labels[i]);
            sum[l] += src[i];
            lo[l] = std::min(lo[l], src[i]);
            hi[l] = std::max(hi[l], src[i]);
        }
        auto dst = out.channel(c).samples();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            const auto l = static_cast<std::size_t>(seg.labels[i]);
            // Rounding in the sum may leave the mean an ulp outside the segment's range.
            dst[i] = std::clamp(sum[l] / static_cast<double>(count[l]), lo[l], hi[l]);
        }
    }
    return out;
}

Frame superpixel_anonymize(const Frame& f, const SlicParams& p, Exec exec) {
    return fill_segments(f, slic_segment(f, p, exec));
}

}  // namespace wavescrub
