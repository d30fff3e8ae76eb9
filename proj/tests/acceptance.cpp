// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "support.hpp"
#include "wavescrub/app.hpp"
#include "wavescrub/baselines.hpp"
#include "wavescrub/dwt.hpp"
#include "wavescrub/error.hpp"
#include "wavescrub/metrics.hpp"
#include "wavescrub/scene.hpp"
#include "wavescrub/video_io.hpp"
#include "wavescrub/wtaa.hpp"

using namespace wavescrub;
using namespace wavescrub::test;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// 1 ---------------------------------------------------------------------------

Outcome perfect_reconstruction() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    double worst[3] = {0.0, 0.0, 0.0};
    int odd = 0;
    for (int i = 0; i < 200; ++i) {
        int w = uniform_int(rng, 8, 129);
        int h = uniform_int(rng, 8, 97);
        if (i == 0) w = h = 8;
        if (i == 1) w = 129, h = 97;
        if (w % 2 || h % 2) ++odd;
        const Plane p = random_plane(rng, w, h);
        for (int b = 0; b < 3; ++b) {
            const auto basis = WaveletBasis::make(static_cast<BasisId>(b));
            for (int L = 1; L <= std::min(4, max_levels(p.size())); ++L) {
                worst[b] = std::max(worst[b], max_abs_diff(p, reconstruct(decompose(p, basis, L))));
            }
        }
    }
    const double secs = seconds_since(t0);
    Outcome o;
    o.pass = worst[0] <= 1e-5 && worst[1] <= 1e-5 && worst[2] <= 1e-4 && secs < 10.0 && odd > 0;
    o.detail = "max err haar " + fmt("%.2e", worst[0]) + ", db4 " + fmt("%.2e", worst[1]) + ", cdf97 " +
               fmt("%.2e", worst[2]) + ", " + std::to_string(odd) + " odd-dim frames, " + fmt("%.2f s", secs);
    return o;
}

// 2 ---------------------------------------------------------------------------

/// Largest |a - b| over pixels inside whole k x k cells and over pixels in
/// the clipped cells along the right and bottom edges.
std::pair<double, double> split_error(const Frame& a, const Frame& b, int k) {
    double whole = 0.0;
    double edge = 0.0;
    const int wx = a.width() / k * k;
    const int wy = a.height() / k * k;
    for (int c = 0; c < a.channels(); ++c) {
        for (int y = 0; y < a.height(); ++y) {
            for (int x = 0; x < a.width(); ++x) {
                const double d = std::abs(a.channel(c).at(x, y) - b.channel(c).at(x, y));
                double& slot = x < wx && y < wy ? whole : edge;
                slot = std::max(slot, d);
            }
        }
    }
    return {whole, edge};
}

Outcome haar_oracle(std::vector<std::string>& notes) {
    std::mt19937_64 rng(202);
    double vs_mosaic = 0.0;
    double vs_downsample = 0.0;
    double whole_cells = 0.0;
    double edge_cells = 0.0;
    double aligned = 0.0;
    int aligned_frames = 0;
    for (int i = 0; i < 100; ++i) {
        const int w = 2 * uniform_int(rng, 8, 48);
        const int h = 2 * uniform_int(rng, 8, 48);
        const Frame f = random_frame(rng, w, h);
        bool all_aligned = true;
        for (int L = 1; L <= 3; ++L) {
            WtaaConfig cfg;
            cfg.basis = WaveletBasis::make(BasisId::Haar);
            cfg.policy = default_policy(L, L);
            const Frame anon = anonymize_wtaa(f, cfg);
            const Frame mosaic = block_mean_mosaic(f, 1 << L);
            const double e = max_abs_diff(anon, mosaic);
            vs_mosaic = std::max(vs_mosaic, e);
            vs_downsample = std::max(vs_downsample, max_abs_diff(anon, downsample_anonymize(f, {1 << L})));
            const auto [whole, edge] = split_error(anon, mosaic, 1 << L);
            whole_cells = std::max(whole_cells, whole);
            edge_cells = std::max(edge_cells, edge);
            if (w % (1 << L) == 0 && h % (1 << L) == 0) aligned = std::max(aligned, e);
            else all_aligned = false;
        }
        aligned_frames += all_aligned;
    }
    notes.push_back("2 whole cells max err " + fmt("%.2e", whole_cells) + ", clipped edge cells max err " +
                    fmt("%.2e", edge_cells) + "; dims divisible by 2^L max err " + fmt("%.2e", aligned) + " (" +
                    std::to_string(aligned_frames) + " frames divisible at every L)");
    return {vs_mosaic <= 1e-5 && vs_downsample <= 1e-5,
            "max |wtaa - block mosaic| " + fmt("%.2e", vs_mosaic) + ", max |wtaa - downsample| " +
                fmt("%.2e", vs_downsample)};
}

// 3 ---------------------------------------------------------------------------

Outcome scale_invariance() {
    std::mt19937_64 rng(303);
    const auto haar = WaveletBasis::make(BasisId::Haar);
    double ll_err = 0.0;
    double anon_err = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int w = 16 * uniform_int(rng, 2, 8);
        const int h = 16 * uniform_int(rng, 2, 8);
        const Frame f = random_frame(rng, w, h);
        const Frame half = boxdown2(f);
        for (int L = 1; L <= 3; ++L) {
            for (int c = 0; c < f.channels(); ++c) {
                const Plane full_ll = approximation(f.channel(c), haar, L);
                Plane half_ll = approximation(half.channel(c), haar, L - 1);
                for (auto& v : half_ll.samples()) v *= 2.0;
                ll_err = std::max(ll_err, max_abs_diff(full_ll, half_ll));
            }
        }
        for (int L = 2; L <= 3; ++L) {
            for (int d = 1; d <= L; ++d) {
                WtaaConfig full;
                full.basis = haar;
                full.policy = default_policy(L, d);
                WtaaConfig shifted;
                shifted.basis = haar;
                shifted.policy = default_policy(L - 1, d - 1);
                const Frame a = boxdown2(anonymize_wtaa(f, full));
                const Frame b = anonymize_wtaa(half, shifted);
                anon_err = std::max(anon_err, max_abs_diff(a, b));
            }
        }
    }
    return {ll_err <= 1e-9 && anon_err <= 1e-5,
            "max |LL_L(f) - 2 LL_(L-1)(down f)| " + fmt("%.2e", ll_err) + ", max |down(anon f) - anon'(down f)| " +
                fmt("%.2e", anon_err)};
}

// 4 ---------------------------------------------------------------------------

Outcome distant_figure(std::vector<std::string>& notes) {
    const auto t0 = Clock::now();
    const Scene scene = make_near_far_scene();

    CompareConfig cfg;
    MethodParams haar;
    haar.basis = BasisId::Haar;
    haar.levels = 4;
    cfg.methods = {default_sweep(Method::Wtaa, haar), default_sweep(Method::Gaussian),
                   default_sweep(Method::Superpixel)};
    const CompareReport r = compare_frames({scene.frame}, scene.regions, cfg);

    auto far = [&](std::size_t m) -> const RegionMetrics& {
        const auto& mc = r.methods[m];
        return mc.points[mc.matched].metrics.per_region.at("far_figure");
    };
    const auto& w = far(0);
    const auto& g = far(1);
    const auto& s = far(2);
    const double wc = *w.contrast_retention;
    const double gc = *g.contrast_retention;
    const double sc = *s.contrast_retention;

    bool matched = true;
    for (const auto& mc : r.methods) matched = matched && mc.within_tolerance;
    const bool beats_gaussian = w.edge_retention > g.edge_retention && wc > gc;
    const bool beats_superpixel = w.edge_retention > s.edge_retention && wc > sc;
    const bool wtaa_floor = wc >= 0.9;
    const bool gaussian_ceiling = gc <= 0.6;
    const double secs = seconds_since(t0);

    auto describe = [&](std::size_t m, const RegionMetrics& x) {
        const auto& mc = r.methods[m];
        return std::string(to_string(mc.method)) + " " + params_to_json(mc.method, mc.points[mc.matched].params).dump() +
               " near " + fmt("%.2f dB", mc.matched_psnr_db) + " far edge " + fmt("%.4f", x.edge_retention) +
               " contrast " + fmt("%.4f", *x.contrast_retention);
    };
    notes.push_back("4 matched " + describe(0, w));
    notes.push_back("4 matched " + describe(1, g));
    notes.push_back("4 matched " + describe(2, s));
    notes.push_back(std::string("4 wtaa > gaussian (edge and contrast): ") + (beats_gaussian ? "yes" : "no"));
    notes.push_back(std::string("4 wtaa > superpixel (edge and contrast): ") + (beats_superpixel ? "yes" : "no"));
    notes.push_back(std::string("4 wtaa contrast >= 0.9: ") + (wtaa_floor ? "yes" : "no"));
    notes.push_back(std::string("4 gaussian contrast <= 0.6: ") + (gaussian_ceiling ? "yes" : "no"));

    // For reference only: the same protocol with the default basis.
    CompareConfig cdf;
    cdf.methods = {default_sweep(Method::Wtaa), default_sweep(Method::Gaussian)};
    const CompareReport rc = compare_frames({scene.frame}, scene.regions, cdf);
    const auto& cm = rc.methods[0];
    notes.push_back("4 info " + std::string("wtaa ") + params_to_json(cm.method, cm.points[cm.matched].params).dump() +
                    " near " + fmt("%.2f dB", cm.matched_psnr_db) + " far edge " +
                    fmt("%.4f", cm.points[cm.matched].metrics.per_region.at("far_figure").edge_retention) +
                    " contrast " +
                    fmt("%.4f", *cm.points[cm.matched].metrics.per_region.at("far_figure").contrast_retention));

    Outcome o;
    o.pass = matched && beats_gaussian && beats_superpixel && wtaa_floor && gaussian_ceiling && secs < 30.0;
    o.detail = std::string("matched within 20+-1 dB: ") + (matched ? "yes" : "no") + "; wtaa>gaussian " +
               (beats_gaussian ? "yes" : "no") + ", wtaa>superpixel " + (beats_superpixel ? "yes" : "no") +
               ", wtaa contrast " + fmt("%.3f", wc) + " (>=0.9), gaussian contrast " + fmt("%.3f", gc) +
               " (<=0.6), " + fmt("%.1f s", secs);
    return o;
}

// 5 ---------------------------------------------------------------------------

bool four_connected_partition(const Segmentation& seg) {
    const int w = seg.width;
    const int h = seg.height;
    if (static_cast<int>(seg.labels.size()) != w * h) return false;
    std::vector<int> seen_label(static_cast<std::size_t>(seg.count), 0);
    std::vector<char> visited(seg.labels.size(), 0);
    for (int label : seg.labels) {
        if (label < 0 || label >= seg.count) return false;
    }
    for (int start = 0; start < w * h; ++start) {
        if (visited[static_cast<std::size_t>(start)]) continue;
        const int label = seg.labels[static_cast<std::size_t>(start)];
        if (seen_label[static_cast<std::size_t>(label)]++) return false;  // second component of one label
        std::vector<int> stack = {start};
        visited[static_cast<std::size_t>(start)] = 1;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            const int x = i % w;
            const int y = i / w;
            const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
            for (const auto& n : nb) {
                if (n[0] < 0 || n[1] < 0 || n[0] >= w || n[1] >= h) continue;
                const int j = n[1] * w + n[0];
                if (!visited[static_cast<std::size_t>(j)] && seg.labels[static_cast<std::size_t>(j)] == label) {
                    visited[static_cast<std::size_t>(j)] = 1;
                    stack.push_back(j);
                }
            }
        }
    }
    for (int c : seen_label) {
        if (c != 1) return false;  // every label used exactly once
    }
    return true;
}

Outcome baseline_correctness() {
    std::mt19937_64 rng(505);
    double gauss_err = 0.0;
    for (double sigma : {0.8, 1.5, 3.0}) {
        const Frame f = random_frame(rng, 16, 16);
        const Frame blurred = gaussian_blur(f, {sigma});
        for (int c = 0; c < f.channels(); ++c) {
            gauss_err = std::max(gauss_err, max_abs_diff(blurred.channel(c), dense_gaussian(f.channel(c), sigma)));
        }
    }
    int partitions_ok = 0;
    int deterministic = 0;
    const int trials = 6;
    for (int i = 0; i < trials; ++i) {
        const Frame f = i % 2 ? random_frame(rng, 64 + 7 * i, 48 + 5 * i) : make_near_far_scene().frame;
        const SlicParams p{uniform_int(rng, 16, 300), 0.05 + 0.1 * i, 10};
        const Segmentation a = slic_segment(f, p, Exec::Parallel);
        const Segmentation b = slic_segment(f, p, Exec::Parallel);
        const Segmentation c = slic_segment(f, p, Exec::Serial);
        partitions_ok += four_connected_partition(a);
        deterministic += a.labels == b.labels && a.labels == c.labels && a.count == c.count;
    }
    return {gauss_err <= 1e-5 && partitions_ok == trials && deterministic == trials,
            "max |separable - dense| " + fmt("%.2e", gauss_err) + ", SLIC partitions complete and 4-connected " +
                std::to_string(partitions_ok) + "/" + std::to_string(trials) + ", deterministic " +
                std::to_string(deterministic) + "/" + std::to_string(trials)};
}

// 6 ---------------------------------------------------------------------------

Outcome metric_identities() {
    std::mt19937_64 rng(606);
    const Frame f = random_frame(rng, 64, 48, Colorspace::RGB, 0.0, 1.0 - 1.0 / 255.0);
    Frame shifted = f;
    for (auto& p : shifted.planes()) {
        for (auto& v : p.samples()) v += 1.0 / 255.0;
    }
    const double cap = psnr(f, f);
    const double offset = psnr(f, shifted);
    const double self = ssim(f, f);
    return {cap == 99.0 && std::abs(offset - 48.13) <= 0.01 && std::abs(self - 1.0) <= 1e-9,
            "psnr(f,f) " + fmt("%.2f", cap) + ", offset 1/255 " + fmt("%.4f dB", offset) + ", ssim(f,f) " +
                fmt("%.12f", self)};
}

// 7 ---------------------------------------------------------------------------

std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) b = static_cast<std::uint8_t>(rng() & 0xff);
    return out;
}

std::vector<std::uint8_t> generated_ppm(std::mt19937_64& rng) {
    const int w = uniform_int(rng, 1, 40);
    const int h = uniform_int(rng, 1, 40);
    const std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    const auto body = random_bytes(rng, static_cast<std::size_t>(w) * h * 3);
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

std::string generated_y4m(std::mt19937_64& rng) {
    VideoStreamHeader h;
    h.width = uniform_int(rng, 1, 24);
    h.height = uniform_int(rng, 1, 24);
    h.fps_num = uniform_int(rng, 1, 60000);
    h.fps_den = uniform_int(rng, 1, 1001);
    h.chroma = ChromaFormat::C444;
    h.chroma_token = "444";
    if (rng() % 2) h.interlace = "p";
    if (rng() % 2) h.aspect = "1:1";
    if (rng() % 3 == 0) h.extensions = {"YSCSS=444"};
    std::string s = h.serialize();
    const int frames = uniform_int(rng, 1, 3);
    for (int i = 0; i < frames; ++i) {
        s += "FRAME\n";
        const auto body = random_bytes(rng, static_cast<std::size_t>(h.width) * h.height * 3);
        s.append(body.begin(), body.end());
    }
    return s;
}

std::string y4m_round_trip(const std::string& bytes) {
    std::istringstream in(bytes);
    Y4mReader reader(in);
    std::ostringstream out;
    Y4mWriter writer(out, reader.header());
    while (auto f = reader.next()) writer.write(*f);
    writer.finish();
    return out.str();
}

/// Parses `bytes` as PPM or Y4M; returns 0 for success, 1 for a typed error,
/// 2 for anything else.
int parse_outcome(const std::string& bytes, bool y4m) {
    try {
        if (y4m) {
            std::istringstream in(bytes);
            Y4mReader reader(in);
            while (reader.next()) {
            }
        } else {
            const std::vector<std::uint8_t> v(bytes.begin(), bytes.end());
            (void)read_ppm(std::span<const std::uint8_t>(v));
        }
        return 0;
    } catch (const Error&) {
        return 1;
    } catch (...) {
        return 2;
    }
}

std::string mutate(std::mt19937_64& rng, std::string s, std::size_t header_len) {
    const int ops = uniform_int(rng, 1, 4);
    static const std::string alphabet = "P6Y4MPEG2 WHFCIAX0123456789:-#\n\t\r.abc\xff";
    for (int k = 0; k < ops; ++k) {
        const std::size_t span = std::max<std::size_t>(1, std::min(s.size(), header_len + 2));
        const std::size_t pos = s.empty() ? 0 : rng() % span;
        switch (rng() % 6) {
        case 0:
            if (!s.empty()) s[pos] = alphabet[rng() % alphabet.size()];
            break;
        case 1: s.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
        case 2:
            if (!s.empty()) s.erase(pos, 1);
            break;
        case 3: s.resize(rng() % (s.size() + 1)); break;
        case 4: s.insert(pos, std::to_string(rng())); break;
        default:
            if (!s.empty()) s[pos] = static_cast<char>(rng() & 0xff);
            break;
        }
    }
    return s;
}

Outcome codec_exactness() {
    std::mt19937_64 rng(707);
    int ppm_ok = 0;
    int y4m_ok = 0;
    for (int i = 0; i < 100; ++i) {
        const auto bytes = generated_ppm(rng);
        ppm_ok += write_ppm(read_ppm(std::span<const std::uint8_t>(bytes))) == bytes;
        const auto y4m = generated_y4m(rng);
        y4m_ok += y4m_round_trip(y4m) == y4m;
    }
    int typed = 0;
    int accepted = 0;
    int untyped = 0;
    for (int i = 0; i < 10000; ++i) {
        const bool y4m = i % 2 == 1;
        std::string seed;
        std::size_t header_len = 0;
        if (y4m) {
            seed = generated_y4m(rng);
            header_len = seed.find('\n');
        } else {
            const auto b = generated_ppm(rng);
            seed.assign(b.begin(), b.end());
            header_len = 12;
        }
        const int r = parse_outcome(mutate(rng, seed, header_len), y4m);
        typed += r == 1;
        accepted += r == 0;
        untyped += r == 2;
    }
    return {ppm_ok == 100 && y4m_ok == 100 && untyped == 0,
            "round trips ppm " + std::to_string(ppm_ok) + "/100, y4m c444 " + std::to_string(y4m_ok) +
                "/100; fuzz 10000 cases: " + std::to_string(typed) + " typed errors, " + std::to_string(accepted) +
                " still valid, " + std::to_string(untyped) + " untyped failures"};
}

// 8 ---------------------------------------------------------------------------

Outcome thread_determinism() {
    TempDir dir("accept8");
    SynthConfig synth;
    synth.scene.noise = 0.05;
    synth.frames = 32;
    synth.format = StreamFormat::Y4m;
    synth.output = dir.file("in.y4m");
    cmd_synth(synth);

    bool same = true;
    std::string detail;
    for (Method m : {Method::Wtaa, Method::Superpixel}) {
        std::vector<std::uint8_t> reference;
        for (int threads : {1, 4, 8}) {
            RunConfig cfg;
            cfg.input = synth.output;
            cfg.output = dir.file("out_" + std::to_string(threads) + ".y4m");
            cfg.method = m;
            cfg.threads = threads;
            const auto s = cmd_anonymize(cfg);
            const auto bytes = read_bytes(cfg.output);
            if (s.frames != 32) same = false;
            if (threads == 1) reference = bytes;
            else same = same && bytes == reference;
        }
        detail += std::string(to_string(m)) + " " + std::to_string(reference.size()) + " bytes; ";
    }
    return {same, detail + "outputs for threads 1, 4, 8 " + (same ? "identical" : "differ")};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    std::vector<std::string> notes;
    const std::vector<Criterion> criteria = {
        {1, "perfect reconstruction", perfect_reconstruction},
        {2, "haar block-mean oracle", [&] { return haar_oracle(notes); }},
        {3, "scale-invariance identity", scale_invariance},
        {4, "distant-figure preservation", [&] { return distant_figure(notes); }},
        {5, "baseline correctness", baseline_correctness},
        {6, "metric identities", metric_identities},
        {7, "codec bit-exactness and fuzzing", codec_exactness},
        {8, "thread-count determinism", thread_determinism},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    for (const auto& n : notes) std::printf("  note %s\n", n.c_str());
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
