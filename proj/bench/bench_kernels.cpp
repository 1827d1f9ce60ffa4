// Serial vs OpenMP comparison for the hot kernels, and the exact
// per-coefficient filter against its LUT counterpart.

#include <benchmark/benchmark.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "llf/filter.hpp"
#include "llf/imageio.hpp"
#include "llf/pyramid.hpp"
#include "llf/rng.hpp"

namespace {

llf::Image random_image(int w, int h, uint64_t seed) {
    llf::Rng rng(seed);
    llf::Image img(w, h);
    for (double& v : img.pixels()) v = rng.uniform(0.05, 0.95);
    return img;
}

void set_threads(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void BM_downsample(benchmark::State& state) {
    set_threads(static_cast<int>(state.range(1)));
    const llf::Image img = random_image(static_cast<int>(state.range(0)),
                                        static_cast<int>(state.range(0)), 1);
    for (auto _ : state) {
        llf::Image out = llf::downsample(img);
        benchmark::DoNotOptimize(out.data());
    }
    set_threads(max_threads());
}

void BM_build_laplacian(benchmark::State& state) {
    set_threads(static_cast<int>(state.range(1)));
    const llf::Image img = random_image(static_cast<int>(state.range(0)),
                                        static_cast<int>(state.range(0)), 2);
    for (auto _ : state) {
        auto pyr = llf::build_laplacian(img, 0);
        benchmark::DoNotOptimize(pyr.bands.data());
    }
    set_threads(max_threads());
}

void BM_llf_naive(benchmark::State& state) {
    set_threads(static_cast<int>(state.range(1)));
    const llf::Image img = random_image(static_cast<int>(state.range(0)),
                                        static_cast<int>(state.range(0)), 3);
    const llf::OrigRemap remap(0.2, 0.3, 2.0);
    llf::LlfConfig cfg;
    for (auto _ : state) {
        llf::Image out = llf::llf_naive(img, remap, cfg);
        benchmark::DoNotOptimize(out.data());
    }
    set_threads(max_threads());
}

void BM_llf_fast(benchmark::State& state) {
    set_threads(static_cast<int>(state.range(1)));
    const llf::Image img = random_image(static_cast<int>(state.range(0)),
                                        static_cast<int>(state.range(0)), 3);
    const llf::OrigRemap remap(0.2, 0.3, 2.0);
    llf::LlfConfig cfg;
    cfg.lut_levels = static_cast<int>(state.range(2));
    for (auto _ : state) {
        llf::Image out = llf::llf_fast(img, remap, cfg);
        benchmark::DoNotOptimize(out.data());
    }
    set_threads(max_threads());
}

}  // namespace

BENCHMARK(BM_downsample)->Args({512, 1})->Args({512, 2})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_build_laplacian)->Args({512, 1})->Args({512, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_llf_naive)->Args({64, 1})->Args({64, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_llf_fast)
    ->Args({64, 1, 64})
    ->Args({64, 2, 64})
    ->Args({128, 2, 64})
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
