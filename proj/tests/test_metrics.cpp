#include <doctest.h>

#include <cmath>

#include "llf/imageio.hpp"
#include "llf/metrics.hpp"
#include "llf/rng.hpp"
#include "oracles.hpp"

using llf::Image;

namespace {

Image random_image(int w, int h, llf::Rng& rng, double lo = 0.0, double hi = 1.0) {
    Image img(w, h);
    for (double& v : img.pixels()) v = rng.uniform(lo, hi);
    return img;
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("mse basics and oracle") {
    llf::Rng rng(31);
    const Image a = random_image(8, 8, rng);
    CHECK(llf::mse(a, a) == 0.0);

    Image b = a;
    for (double& v : b.pixels()) v += 0.1;
    CHECK(llf::mse(a, b) == doctest::Approx(0.01).epsilon(1e-12));

    const Image c = random_image(8, 8, rng);
    double acc = 0.0;
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) acc += (a(x, y) - c(x, y)) * (a(x, y) - c(x, y));
    CHECK(std::abs(llf::mse(a, c) - acc / 64.0) < 1e-15);

    const Image wrong(4, 4, 0.0);
    CHECK_THROWS_AS(llf::mse(a, wrong), llf::config_error);
}

TEST_CASE("mse is translation invariant") {
    llf::Rng rng(32);
    const Image a = random_image(8, 8, rng);
    const Image b = random_image(8, 8, rng);
    Image ac = a, bc = b;
    for (double& v : ac.pixels()) v += 0.31;
    for (double& v : bc.pixels()) v += 0.31;
    CHECK(std::abs(llf::mse(ac, bc) - llf::mse(a, b)) < 1e-15);
}

TEST_CASE("ssim of an image with itself is one") {
    llf::Rng rng(33);
    const Image a = random_image(16, 16, rng);
    const Image map = llf::ssim_map(a, a);
    for (double v : map.pixels()) CHECK(std::abs(v - 1.0) < 1e-12);
    CHECK(llf::mssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    const Image c1(16, 16, 0.42), c2(16, 16, 0.42);
    CHECK(llf::mssim(c1, c2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inverted structure scores below one") {
    llf::Rng rng(34);
    const Image a = random_image(16, 16, rng);
    Image b(16, 16);
    for (size_t i = 0; i < a.size(); ++i) b.data()[i] = 1.0 - a.data()[i];
    const Image map = llf::ssim_map(a, b);
    for (double v : map.pixels()) CHECK(v < 1.0);
}

TEST_CASE("ssim map matches the direct windowed-statistics oracle") {
    llf::Rng rng(35);
    const Image a = random_image(16, 16, rng);
    const Image b = random_image(16, 16, rng);
    const Image map = llf::ssim_map(a, b);
    for (auto [px, py] : {std::pair{8, 8}, {0, 0}, {15, 3}, {5, 15}, {2, 9}})
        CHECK(std::abs(map(px, py) - oracle::ssim_at(a, b, px, py)) < 1e-10);

    double acc = 0.0;
    for (double v : map.pixels()) acc += v;
    CHECK(llf::mssim(a, b) == doctest::Approx(acc / map.size()).epsilon(1e-15));
}

TEST_CASE("ssim is symmetric and bounded") {
    llf::Rng rng(36);
    for (int i = 0; i < 5; ++i) {
        const Image a = random_image(14, 18, rng);
        const Image b = random_image(14, 18, rng);
        CHECK(std::abs(llf::mssim(a, b) - llf::mssim(b, a)) <= 1e-12);
        for (double v : llf::ssim_map(a, b).pixels()) {
            CHECK(v >= -1.0);
            CHECK(v <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("small affine changes barely move the score") {
    const auto [input, target] =
        llf::synth_pair(7, 64, 64, llf::SynthStyleParams{0.2, 0.3, 2.0, 1.0, 0.0});
    (void)target;
    Image scaled(64, 64);
    for (size_t i = 0; i < input.size(); ++i)
        scaled.data()[i] = input.data()[i] * 1.02 + 0.01;
    CHECK(llf::mssim(input, scaled) >= 0.99);
}

TEST_CASE("images below the window size are rejected") {
    const Image tiny(8, 8, 0.5);
    CHECK_THROWS_AS(llf::ssim_map(tiny, tiny), llf::config_error);
}

TEST_CASE("mssim gradient matches finite differences") {
    llf::Rng rng(37);
    Image a = random_image(16, 16, rng);
    const Image b = random_image(16, 16, rng);
    const Image grad = llf::mssim_backward(a, b, {}, 1.0);

    for (int t = 0; t < 20; ++t) {
        // include border pixels in the sample
        const int px = t < 5 ? (t % 2 ? 15 : 0) : rng.uniform_int(0, 15);
        const int py = t < 5 ? rng.uniform_int(0, 15) : (t % 3 ? rng.uniform_int(0, 15) : 0);
        const double h = 1e-6;
        const double fd = oracle::central_diff(
            [&](double v) {
                const double keep = a(px, py);
                a(px, py) = v;
                const double m = llf::mssim(a, b);
                a(px, py) = keep;
                return m;
            },
            a(px, py), h);
        const double got = grad(px, py);
        const double denom = std::max({std::abs(fd), std::abs(got), 1e-8});
        CHECK(std::abs(got - fd) / denom < 1e-5);
    }
}

TEST_CASE("mssim gradient vanishes at the maximum and scales with upstream") {
    llf::Rng rng(38);
    const Image a = random_image(16, 16, rng);
    const Image at_max = llf::mssim_backward(a, a, {}, 1.0);
    for (double v : at_max.pixels()) CHECK(std::abs(v) < 1e-12);

    const Image b = random_image(16, 16, rng);
    const Image zero = llf::mssim_backward(a, b, {}, 0.0);
    for (double v : zero.pixels()) CHECK(v == 0.0);
}

TEST_CASE("gradient histogram basics") {
    const Image flat(8, 8, 0.37);
    const auto h = llf::gradient_histogram(flat);
    CHECK(h.horizontal[llf::GradientHistogram::bin_of(0.0)] == 1.0);
    CHECK(h.vertical[llf::GradientHistogram::bin_of(0.0)] == 1.0);

    Image ramp(9, 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 9; ++x) ramp(x, y) = x / 8.0;
    const auto hr = llf::gradient_histogram(ramp);
    CHECK(hr.horizontal[llf::GradientHistogram::bin_of(1.0 / 8.0)] == 1.0);

    double hsum = 0.0, vsum = 0.0;
    for (int i = 0; i < llf::GradientHistogram::kBins; ++i) {
        hsum += hr.horizontal[i];
        vsum += hr.vertical[i];
    }
    CHECK(hsum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(vsum == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(llf::gradient_histogram(Image(1, 8, 0.0)), llf::config_error);
}

TEST_CASE("gradient histogram matches a direct binning oracle") {
    llf::Rng rng(39);
    const Image a = random_image(8, 8, rng);
    const auto h = llf::gradient_histogram(a);

    std::vector<double> hh(256, 0.0), vv(256, 0.0);
    auto bin_of = [](double g) {
        int idx = static_cast<int>(std::floor((g + 1.0) * 128.0));
        return std::clamp(idx, 0, 255);
    };
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 7; ++x) hh[bin_of(a(x + 1, y) - a(x, y))] += 1.0 / 56.0;
    for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 8; ++x) vv[bin_of(a(x, y + 1) - a(x, y))] += 1.0 / 56.0;
    for (int i = 0; i < 256; ++i) {
        CHECK(h.horizontal[i] == doctest::Approx(hh[i]).epsilon(1e-12));
        CHECK(h.vertical[i] == doctest::Approx(vv[i]).epsilon(1e-12));
    }
}

TEST_SUITE_END();
