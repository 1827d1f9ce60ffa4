#include "llf/baseline.hpp"

#include <algorithm>
#include <cmath>

namespace llf {

namespace {

struct Cdf {
    int bins;
    double lo = -1.0, hi = 1.0;
    std::vector<double> mass;  // per bin, sums to 1
    std::vector<double> cum;   // at bin edges, cum[0] = 0, cum[bins] = 1

    double edge(int j) const { return lo + (hi - lo) * j / bins; }

    double eval(double v) const {
        if (v <= lo) return 0.0;
        if (v >= hi) return 1.0;
        const double pos = (v - lo) / (hi - lo) * bins;
        int j = std::clamp(static_cast<int>(std::floor(pos)), 0, bins - 1);
        return cum[j] + mass[j] * (pos - j);
    }

    // leftmost x with CDF(x) >= u
    double inverse(double u) const {
        u = std::clamp(u, 0.0, 1.0);
        for (int j = 0; j < bins; ++j) {
            if (cum[j + 1] >= u) {
                if (mass[j] <= 0.0) return edge(j);
                return edge(j) + (u - cum[j]) / mass[j] * (hi - lo) / bins;
            }
        }
        return hi;
    }
};

Cdf make_cdf(const std::vector<double>& counts) {
    Cdf c;
    c.bins = static_cast<int>(counts.size());
    double total = 0.0;
    for (double v : counts) total += v;
    c.mass.resize(c.bins);
    for (int j = 0; j < c.bins; ++j) c.mass[j] = counts[j] / total;
    c.cum.assign(c.bins + 1, 0.0);
    for (int j = 0; j < c.bins; ++j) c.cum[j + 1] = c.cum[j] + c.mass[j];
    return c;
}

void accumulate_gradients(const Image& img, std::vector<double>& counts) {
    const int bins = static_cast<int>(counts.size());
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
}

bool single_bin(const std::vector<double>& counts) {
    int occupied = 0;
    for (double v : counts)
        if (v > 0.0) ++occupied;
    return occupied <= 1;
}

BaselineFit fit_from_counts(const std::vector<double>& in_counts,
                            const std::vector<double>& tg_counts) {
    constexpr int kCurveSize = 1024;
    BaselineFit fit;
    fit.curve.grid = RemapCurve::make_grid(kCurveSize);
    fit.curve.values.resize(kCurveSize);

    if (single_bin(in_counts) && single_bin(tg_counts)) {
        fit.degenerate = true;
        fit.curve.values = fit.curve.grid;
        return fit;
    }

    const Cdf cdf_in = make_cdf(in_counts);
    const Cdf cdf_tg = make_cdf(tg_counts);
    auto transfer = [&](double v) { return cdf_tg.inverse(cdf_in.eval(v)); };

    // odd-symmetrized magnitude transfer anchored at r(0) = 0
    for (int j = 0; j < kCurveSize; ++j) {
        const double d = fit.curve.grid[j];
        if (d == 0.0) {
            fit.curve.values[j] = 0.0;
            continue;
        }
        const double m = std::abs(d);
        const double t = 0.5 * (transfer(m) - transfer(-m));
        fit.curve.values[j] = d > 0.0 ? t : -t;
    }
    return fit;
}

void check_pair(const Image& input, const Image& target) {
    if (input.width() < 2 || input.height() < 2 || target.width() < 2 || target.height() < 2)
        throw config_error("baseline fit needs images of at least 2x2 pixels");
}

}  // namespace

BaselineFit fit_gradient_remap(const Image& input, const Image& target, int bins) {
    if (bins < 2) throw config_error("baseline needs at least 2 histogram bins");
    check_pair(input, target);
    std::vector<double> in_counts(bins, 0.0), tg_counts(bins, 0.0);
    accumulate_gradients(input, in_counts);
    accumulate_gradients(target, tg_counts);
    return fit_from_counts(in_counts, tg_counts);
}

BaselineFit fit_gradient_remap(const std::vector<std::pair<Image, Image>>& pairs, int bins) {
    if (bins < 2) throw config_error("baseline needs at least 2 histogram bins");
    if (pairs.empty()) throw config_error("baseline fit needs at least one image pair");
    std::vector<double> in_counts(bins, 0.0), tg_counts(bins, 0.0);
    for (const auto& [input, target] : pairs) {
        check_pair(input, target);
        accumulate_gradients(input, in_counts);
        accumulate_gradients(target, tg_counts);
    }
    return fit_from_counts(in_counts, tg_counts);
}

Image apply_baseline(const Image& img, const RemapCurve& curve, const LlfConfig& cfg) {
    TabulatedRemap remap(curve);
    return llf_fast(img, remap, cfg);
}

}  // namespace llf
