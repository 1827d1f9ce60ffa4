#include <doctest.h>

#include <cmath>

#include "llf/baseline.hpp"
#include "llf/rng.hpp"
#include "oracles.hpp"

using llf::Image;

namespace {

Image random_image(int w, int h, llf::Rng& rng, double lo = 0.0, double hi = 1.0) {
    Image img(w, h);
    for (double& v : img.pixels()) v = rng.uniform(lo, hi);
    return img;
}

std::vector<double> pooled_counts(const Image& img, int bins) {
    std::vector<double> counts(bins, 0.0);
    auto bin_of = [bins](double g) {
        const int idx = static_cast<int>(std::floor((g + 1.0) * (bins / 2.0)));
        return std::clamp(idx, 0, bins - 1);
    };
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x + 1 < img.width(); ++x)
            counts[bin_of(img(x + 1, y) - img(x, y))] += 1.0;
    for (int y = 0; y + 1 < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            counts[bin_of(img(x, y + 1) - img(x, y))] += 1.0;
    double total = 0.0;
    for (double c : counts) total += c;
    for (double& c : counts) c /= total;
    return counts;
}

}  // namespace

TEST_SUITE_BEGIN("baseline");

TEST_CASE("matching histograms give the identity transfer within one bin") {
    llf::Rng rng(71);
    const Image img = random_image(32, 32, rng);
    const auto fit = llf::fit_gradient_remap(img, img, 256);
    CHECK(!fit.degenerate);

    // occupied gradient range of this image
    double gmax = 0.0;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x + 1 < 32; ++x)
            gmax = std::max(gmax, std::abs(img(x + 1, y) - img(x, y)));

    const double bin_width = 2.0 / 256;
    for (int j = 0; j < fit.curve.size(); ++j) {
        const double d = fit.curve.grid[j];
        if (std::abs(d) > gmax - bin_width) continue;
        CHECK(std::abs(fit.curve.values[j] - d) <= bin_width + 1e-12);
    }
}

TEST_CASE("doubled gradients give a transfer of slope two") {
    llf::Rng rng(72);
    // small-amplitude noise keeps both images' gradients well inside [-1, 1]
    const Image input = random_image(32, 32, rng, 0.3, 0.5);
    Image target(32, 32);
    for (size_t i = 0; i < input.size(); ++i)
        target.data()[i] = 2.0 * input.data()[i] - 0.4;

    const auto fit = llf::fit_gradient_remap(input, target, 256);
    const double bin_width = 2.0 / 256;

    // probe the occupied range: slope of the curve between +/- d0
    const double d0 = 0.05;
    const llf::TabulatedRemap tab(fit.curve);
    const double slope = (tab.eval1(d0) - tab.eval1(-d0)) / (2.0 * d0);
    CHECK(slope == doctest::Approx(2.0).epsilon(bin_width / d0));
}

TEST_CASE("transfer agrees with the dense CDF-inversion oracle") {
    llf::Rng rng(73);
    const Image input = random_image(24, 24, rng);
    const Image target = random_image(24, 24, rng, 0.2, 0.9);
    const int bins = 256;
    const auto fit = llf::fit_gradient_remap(input, target, bins);

    const auto in_mass = pooled_counts(input, bins);
    const auto tg_mass = pooled_counts(target, bins);
    auto transfer = [&](double v) {
        return oracle::cdf_inverse_scan(tg_mass, oracle::cdf_eval(in_mass, v));
    };
    for (int j = 0; j < fit.curve.size(); j += 17) {
        const double d = fit.curve.grid[j];
        const double m = std::abs(d);
        const double want = d == 0.0 ? 0.0
                                     : (d > 0 ? 0.5 : -0.5) * (transfer(m) - transfer(-m));
        CHECK(std::abs(fit.curve.values[j] - want) < 1e-4);
    }
}

TEST_CASE("fitted curves are always monotone non-decreasing") {
    llf::Rng rng(74);
    for (int trial = 0; trial < 10; ++trial) {
        const Image input = random_image(20, 20, rng);
        const Image target = random_image(20, 20, rng);
        const auto fit = llf::fit_gradient_remap(input, target, 256);
        for (int j = 1; j < fit.curve.size(); ++j)
            CHECK(fit.curve.values[j] >= fit.curve.values[j - 1] - 1e-12);
        CHECK(llf::check_monotonic(fit.curve).is_monotonic);
    }
}

TEST_CASE("flat images degrade to the identity with a warning flag") {
    const Image a(16, 16, 0.5), b(16, 16, 0.8);
    const auto fit = llf::fit_gradient_remap(a, b, 256);
    CHECK(fit.degenerate);
    for (int j = 0; j < fit.curve.size(); ++j)
        CHECK(fit.curve.values[j] == fit.curve.grid[j]);
}

TEST_CASE("applying the identity curve reproduces the input") {
    llf::Rng rng(75);
    const Image img = random_image(32, 32, rng, 0.05, 0.95);
    llf::RemapCurve identity;
    identity.grid = llf::RemapCurve::make_grid(1024);
    identity.values = identity.grid;
    llf::LlfConfig cfg;
    const Image out = llf::apply_baseline(img, identity, cfg);
    CHECK(llf::max_abs_diff(out, img) < 1e-12);
}

TEST_CASE("non-monotone curves still apply; the audit flags them") {
    llf::Rng rng(76);
    const Image img = random_image(32, 32, rng, 0.05, 0.95);
    llf::RemapCurve wavy;
    wavy.grid = llf::RemapCurve::make_grid(257);
    wavy.values.resize(257);
    for (int j = 0; j < 257; ++j)
        wavy.values[j] = wavy.grid[j] + 0.08 * std::sin(12.0 * wavy.grid[j]);
    CHECK(!llf::check_monotonic(wavy).is_monotonic);
    llf::LlfConfig cfg;
    const Image out = llf::apply_baseline(img, wavy, cfg);
    for (double v : out.pixels()) CHECK(std::isfinite(v));
}

TEST_CASE("pooled fits accept several pairs and reject empty input") {
    llf::Rng rng(77);
    std::vector<std::pair<Image, Image>> pairs;
    for (int i = 0; i < 3; ++i)
        pairs.emplace_back(random_image(16, 16, rng), random_image(16, 16, rng));
    const auto fit = llf::fit_gradient_remap(pairs, 256);
    CHECK(llf::check_monotonic(fit.curve).is_monotonic);

    CHECK_THROWS_AS(llf::fit_gradient_remap({}, 256), llf::config_error);
}

TEST_SUITE_END();
