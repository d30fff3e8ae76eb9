// Serial reference loops against the OpenMP kernels, plus the whole-frame
// operations built on them. Run with OMP_NUM_THREADS to vary the pool.

#include <random>

#include <benchmark/benchmark.h>

#include "wavescrub/baselines.hpp"
#include "wavescrub/kernels.hpp"
#include "wavescrub/wtaa.hpp"

using namespace wavescrub;

namespace {

Plane noise_plane(int side) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Plane p(side, side);
    for (auto& v : p.samples()) v = u(rng);
    return p;
}

Frame noise_frame(int side) {
    return Frame(Colorspace::RGB, {noise_plane(side), noise_plane(side), noise_plane(side)});
}

template <Exec E>
void BM_DwtLevel(benchmark::State& state) {
    const Plane p = noise_plane(static_cast<int>(state.range(0)));
    const auto basis = WaveletBasis::make(static_cast<BasisId>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(dwt2d_level(p, basis, E));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(p.sample_count()));
}

template <Exec E>
void BM_Convolve(benchmark::State& state) {
    const Plane p = noise_plane(static_cast<int>(state.range(0)));
    const auto taps = gaussian_kernel({2.0});
    Plane tmp, out;
    for (auto _ : state) {
        kernels::convolve_rows(E, p, taps, tmp);
        kernels::convolve_cols(E, tmp, taps, out);
        benchmark::DoNotOptimize(out.samples().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(p.sample_count()));
}

template <Exec E>
void BM_Wtaa(benchmark::State& state) {
    const Frame f = noise_frame(static_cast<int>(state.range(0)));
    WtaaConfig cfg;
    cfg.basis = WaveletBasis::make(BasisId::Cdf97);
    cfg.policy = default_policy(4, 2);
    for (auto _ : state) benchmark::DoNotOptimize(anonymize_wtaa(f, cfg, E));
}

template <Exec E>
void BM_Slic(benchmark::State& state) {
    const Frame f = noise_frame(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(slic_segment(f, {200, 0.1, 10}, E));
}

}  // namespace

BENCHMARK(BM_DwtLevel<Exec::Serial>)->ArgsProduct({{256, 1024}, {0, 1, 2}})->Name("dwt_level/serial");
BENCHMARK(BM_DwtLevel<Exec::Parallel>)->ArgsProduct({{256, 1024}, {0, 1, 2}})->Name("dwt_level/omp");
BENCHMARK(BM_Convolve<Exec::Serial>)->Arg(256)->Arg(1024)->Name("gaussian/serial");
BENCHMARK(BM_Convolve<Exec::Parallel>)->Arg(256)->Arg(1024)->Name("gaussian/omp");
BENCHMARK(BM_Wtaa<Exec::Serial>)->Arg(256)->Arg(512)->Name("wtaa_cdf97_L4/serial");
BENCHMARK(BM_Wtaa<Exec::Parallel>)->Arg(256)->Arg(512)->Name("wtaa_cdf97_L4/omp");
BENCHMARK(BM_Slic<Exec::Serial>)->Arg(256)->Name("slic/serial");
BENCHMARK(BM_Slic<Exec::Parallel>)->Arg(256)->Name("slic/omp");

BENCHMARK_MAIN();
