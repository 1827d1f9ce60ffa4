#include <doctest.h>

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "llf/filter.hpp"
#include "llf/imageio.hpp"
#include "llf/rng.hpp"
#include "oracles.hpp"

using llf::Image;
using llf::LlfConfig;
using llf::OrigRemap;

namespace {

Image random_image(int w, int h, llf::Rng& rng, double lo = 0.05, double hi = 0.95) {
    Image img(w, h);
    for (double& v : img.pixels()) v = rng.uniform(lo, hi);
    return img;
}

struct AffineRemap final : llf::RemapFunction {
    double a, b;
    AffineRemap(double a_, double b_) : a(a_), b(b_) {}
    double eval1(double d) const override { return a * d + b; }
};

}  // namespace

TEST_SUITE_BEGIN("filter");

TEST_CASE("identity remap reproduces the input") {
    llf::Rng rng(51);
    const OrigRemap identity(0.3, 1.0, 1.0);
    for (auto [w, h] : {std::pair{32, 32}, {33, 17}}) {
        const Image img = random_image(w, h, rng);
        LlfConfig cfg;
        CHECK(llf::max_abs_diff(llf::llf_naive(img, identity, cfg), img) < 1e-12);
        for (int k : {2, 8, 64}) {
            cfg.lut_levels = k;
            CHECK(llf::max_abs_diff(llf::llf_fast(img, identity, cfg), img) < 1e-12);
        }
    }
}

TEST_CASE("any remap with r(0)=0 fixes constant images exactly") {
    const Image img(32, 32, 0.42);
    const OrigRemap remap(0.2, 0.3, 2.0);
    LlfConfig cfg;
    CHECK(llf::max_abs_diff(llf::llf_naive(img, remap, cfg), img) < 1e-15);
    CHECK(llf::max_abs_diff(llf::llf_fast(img, remap, cfg), img) < 1e-15);

    const AffineRemap doubling(2.0, 0.0);
    CHECK(llf::max_abs_diff(llf::llf_naive(img, doubling, cfg), img) < 1e-15);
}

TEST_CASE("windowed per-coefficient evaluation equals the whole-image reference") {
    llf::Rng rng(52);
    const OrigRemap remap(0.2, 0.3, 2.0);
    for (auto [w, h, levels] : {std::tuple{16, 16, 3}, {17, 13, 2}, {24, 18, 3}}) {
        const Image img = random_image(w, h, rng);
        LlfConfig cfg;
        cfg.num_levels = levels;
        const Image ours = llf::llf_naive(img, remap, cfg);
        const Image ref = oracle::llf_reference(img, remap, levels);
        CHECK(llf::max_abs_diff(ours, ref) < 1e-12);
    }
}

TEST_CASE("affine remaps make the fast path independent of K") {
    llf::Rng rng(53);
    const Image img = random_image(32, 32, rng);
    const AffineRemap remap(1.5, 0.02);
    LlfConfig c2, c64;
    c2.lut_levels = 2;
    c64.lut_levels = 64;
    const Image out2 = llf::llf_fast(img, remap, c2);
    const Image out64 = llf::llf_fast(img, remap, c64);
    CHECK(llf::max_abs_diff(out2, out64) < 1e-12);
}

TEST_CASE("fast path converges to the exact path as K grows") {
    const auto [img, unused] =
        llf::synth_pair(7, 64, 64, llf::SynthStyleParams{0.2, 0.3, 2.0, 1.0, 0.0});
    (void)unused;
    LlfConfig cfg;

    // Differentiable remap: second-order convergence in the context spacing.
    const OrigRemap smooth(0.2, 2.0, 0.5);
    const Image exact_smooth = llf::llf_naive(img, smooth, cfg);
    double prev = 1e9;
    for (int k : {8, 16, 32, 64}) {
        cfg.lut_levels = k;
        const double err = llf::max_abs_diff(llf::llf_fast(img, smooth, cfg), exact_smooth);
        CHECK(err < prev * 0.30);  // ~4x shrink per doubling
        prev = err;
    }
    CHECK(prev <= 1e-3);  // K = 64

    // Detail-amplifying remap (alpha < 1): the unbounded slope at zero limits
    // the rate to ~K^-alpha, but the error still shrinks monotonically.
    const OrigRemap kinked(0.2, 0.3, 2.0);
    cfg = LlfConfig{};
    const Image exact_kinked = llf::llf_naive(img, kinked, cfg);
    prev = 1e9;
    for (int k : {8, 16, 32, 64}) {
        cfg.lut_levels = k;
        const double err = llf::max_abs_diff(llf::llf_fast(img, kinked, cfg), exact_kinked);
        CHECK(err < prev * 1.10);
        prev = err;
    }
}

TEST_CASE("out-of-range context values clamp to the end intervals") {
    llf::Rng rng(54);
    Image img = random_image(32, 32, rng, -0.2, 1.2);
    const llf::TabulatedRemap remap(llf::export_curve(OrigRemap(0.2, 0.5, 1.5), 257));
    LlfConfig cfg;
    auto [out, tape] = llf::llf_fast_with_tape(img, remap, cfg);
    CHECK(tape.context_clamp_count > 0);
    for (double v : out.pixels()) CHECK(std::isfinite(v));

    Image too_far(16, 16, 1.5);
    CHECK_THROWS_AS(llf::llf_fast(too_far, remap, cfg), llf::config_error);
}

TEST_CASE("taped forward equals the plain fast path and is deterministic") {
    llf::Rng rng(55);
    const Image img = random_image(24, 24, rng);
    const llf::TabulatedRemap remap(llf::export_curve(OrigRemap(0.2, 0.3, 2.0), 129));
    LlfConfig cfg;
    cfg.lut_levels = 8;

    const Image plain = llf::llf_fast(img, remap, cfg);
    auto [taped1, tape1] = llf::llf_fast_with_tape(img, remap, cfg);
    auto [taped2, tape2] = llf::llf_fast_with_tape(img, remap, cfg);
    CHECK(llf::max_abs_diff(plain, taped1) == 0.0);
    CHECK(llf::max_abs_diff(taped1, taped2) == 0.0);
    for (size_t l = 0; l < tape1.bank_index.size(); ++l) {
        CHECK(tape1.bank_index[l] == tape2.bank_index[l]);
        CHECK(tape1.bank_weight[l] == tape2.bank_weight[l]);
    }

    const Image ones(img.width(), img.height(), 1.0);
    const auto g1 = llf::llf_backward(tape1, ones);
    const auto g2 = llf::llf_backward(tape2, ones);
    CHECK(g1 == g2);

    const Image zeros(img.width(), img.height(), 0.0);
    for (double g : llf::llf_backward(tape1, zeros)) CHECK(g == 0.0);
}

TEST_CASE("table gradient matches finite differences") {
    llf::Rng rng(56);
    const Image img = random_image(16, 16, rng);
    llf::RemapCurve curve = llf::export_curve(OrigRemap(0.2, 0.3, 2.0), 64);
    LlfConfig cfg;
    cfg.lut_levels = 8;

    auto sum_output = [&](const llf::RemapCurve& c) {
        const Image out = llf::llf_fast(img, llf::TabulatedRemap(c), cfg);
        double acc = 0.0;
        for (double v : out.pixels()) acc += v;
        return acc;
    };

    auto [out, tape] = llf::llf_fast_with_tape(img, llf::TabulatedRemap(curve), cfg);
    (void)out;
    const Image ones(16, 16, 1.0);
    const std::vector<double> grad = llf::llf_backward(tape, ones);

    const double h = 1e-6;
    int significant = 0;
    for (int j = 0; j < curve.size(); j += 3) {
        const double keep = curve.values[j];
        curve.values[j] = keep + h;
        const double up = sum_output(curve);
        curve.values[j] = keep - h;
        const double dn = sum_output(curve);
        curve.values[j] = keep;
        const double fd = (up - dn) / (2.0 * h);
        if (std::abs(fd) > 1e-3) ++significant;
        const double denom = std::max({std::abs(fd), std::abs(grad[j]), 1e-6});
        CHECK(std::abs(grad[j] - fd) / denom < 1e-6);
    }
    CHECK(significant > 3);
}

TEST_CASE("outputs do not depend on the thread count") {
#ifdef _OPENMP
    llf::Rng rng(57);
    const Image img = random_image(33, 29, rng);
    const OrigRemap remap(0.2, 0.3, 2.0);
    LlfConfig cfg;
    cfg.lut_levels = 16;

    const int original = omp_get_max_threads();
    omp_set_num_threads(1);
    const Image serial_fast = llf::llf_fast(img, remap, cfg);
    const Image serial_naive = llf::llf_naive(img, remap, cfg);
    omp_set_num_threads(original);
    const Image parallel_fast = llf::llf_fast(img, remap, cfg);
    const Image parallel_naive = llf::llf_naive(img, remap, cfg);

    CHECK(llf::max_abs_diff(serial_fast, parallel_fast) == 0.0);
    CHECK(llf::max_abs_diff(serial_naive, parallel_naive) == 0.0);
#endif
}

TEST_CASE("configuration errors are rejected") {
    const Image img(16, 16, 0.5);
    const OrigRemap remap(0.2, 0.3, 2.0);
    LlfConfig bad;
    bad.lut_levels = 1;
    CHECK_THROWS_AS(llf::llf_fast(img, remap, bad), llf::config_error);
    LlfConfig deep;
    deep.num_levels = 9;
    CHECK_THROWS_AS(llf::llf_naive(img, remap, deep), llf::config_error);
}

TEST_SUITE_END();
