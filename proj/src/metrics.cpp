#include "llf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "kernels.hpp"

namespace llf {

using kernels::reflect;

namespace {

std::vector<double> gaussian_window(int size, double sigma) {
    std::vector<double> w(size);
    const int r = size / 2;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        w[i] = std::exp(-0.5 * (i - r) * (i - r) / (sigma * sigma));
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

// Separable weighted local mean, reflect-101 borders.
Image window_filter(const Image& img, const std::vector<double>& w) {
    const int r = static_cast<int>(w.size()) / 2;
    const int iw = img.width(), ih = img.height();

    Image tmp(iw, ih);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < ih; ++y) {
        const double* src = img.row(y);
        double* dst = tmp.row(y);
        for (int x = 0; x < iw; ++x) {
            double acc = 0.0;
            for (int k = 0; k < static_cast<int>(w.size()); ++k)
                acc += w[k] * src[reflect(x + k - r, iw)];
            dst[x] = acc;
        }
    }

    Image out(iw, ih);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < ih; ++y) {
        double* dst = out.row(y);
        for (int x = 0; x < iw; ++x) {
            double acc = 0.0;
            for (int k = 0; k < static_cast<int>(w.size()); ++k)
                acc += w[k] * tmp(x, reflect(y + k - r, ih));
            dst[x] = acc;
        }
    }
    return out;
}

// Exact transpose of window_filter (scatter form); differs from the gather
// near borders, which is what makes border-pixel gradients exact.
Image window_filter_adjoint(const Image& grad, const std::vector<double>& w) {
    const int r = static_cast<int>(w.size()) / 2;
    const int iw = grad.width(), ih = grad.height();

    // transpose of the vertical pass
    Image tmp(iw, ih, 0.0);
    for (int y = 0; y < ih; ++y) {
        const double* src = grad.row(y);
        for (int k = 0; k < static_cast<int>(w.size()); ++k) {
            double* dst = tmp.row(reflect(y + k - r, ih));
            const double wgt = w[k];
            for (int x = 0; x < iw; ++x) dst[x] += wgt * src[x];
        }
    }

    // transpose of the horizontal pass
    Image out(iw, ih, 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < ih; ++y) {
        const double* src = tmp.row(y);
        double* dst = out.row(y);
        for (int x = 0; x < iw; ++x) {
            for (int k = 0; k < static_cast<int>(w.size()); ++k)
                dst[reflect(x + k - r, iw)] += w[k] * src[x];
        }
    }
    return out;
}

void check_ssim_args(const Image& a, const Image& b, const SsimParams& p) {
    if (!a.same_size(b)) throw config_error("image dimensions do not match");
    if (a.width() < p.window || a.height() < p.window)
        throw config_error("images smaller than the " + std::to_string(p.window) + "x" +
                           std::to_string(p.window) + " comparison window");
}

struct SsimFields {
    Image mu_a, mu_b, ea2, eb2, eab;
};

SsimFields ssim_fields(const Image& a, const Image& b, const std::vector<double>& w) {
    SsimFields f;
    f.mu_a = window_filter(a, w);
    f.mu_b = window_filter(b, w);
    Image aa(a.width(), a.height()), bb(a.width(), a.height()), ab(a.width(), a.height());
    for (size_t i = 0; i < a.size(); ++i) {
        aa.data()[i] = a.data()[i] * a.data()[i];
        bb.data()[i] = b.data()[i] * b.data()[i];
        ab.data()[i] = a.data()[i] * b.data()[i];
    }
    f.ea2 = window_filter(aa, w);
    f.eb2 = window_filter(bb, w);
    f.eab = window_filter(ab, w);
    return f;
}

}  // namespace

double mse(const Image& a, const Image& b) {
    if (!a.same_size(b)) throw config_error("image dimensions do not match");
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

Image ssim_map(const Image& a, const Image& b, const SsimParams& p) {
    check_ssim_args(a, b, p);
    const std::vector<double> w = gaussian_window(p.window, p.window_sigma);
    const SsimFields f = ssim_fields(a, b, w);
    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);

    Image map(a.width(), a.height());
    for (size_t i = 0; i < map.size(); ++i) {
        const double mu_a = f.mu_a.data()[i], mu_b = f.mu_b.data()[i];
        const double var_a = f.ea2.data()[i] - mu_a * mu_a;
        const double var_b = f.eb2.data()[i] - mu_b * mu_b;
        const double cov = f.eab.data()[i] - mu_a * mu_b;
        const double a1 = 2.0 * mu_a * mu_b + c1;
        const double a2 = 2.0 * cov + c2;
        const double b1 = mu_a * mu_a + mu_b * mu_b + c1;
        const double b2 = var_a + var_b + c2;
        map.data()[i] = (a1 * a2) / (b1 * b2);
    }
    return map;
}

double mssim(const Image& a, const Image& b, const SsimParams& p) {
    const Image map = ssim_map(a, b, p);
    double acc = 0.0;
    for (double v : map.pixels()) acc += v;
    return acc / static_cast<double>(map.size());
}

Image mssim_backward(const Image& a, const Image& b, const SsimParams& p, double upstream) {
    check_ssim_args(a, b, p);
    const std::vector<double> w = gaussian_window(p.window, p.window_sigma);
    const SsimFields f = ssim_fields(a, b, w);
    const double c1 = (p.k1 * p.dynamic_range) * (p.k1 * p.dynamic_range);
    const double c2 = (p.k2 * p.dynamic_range) * (p.k2 * p.dynamic_range);

    // Partials of the local score w.r.t. (mu_a, E[a^2], E[ab]); the window
    // adjoint then spreads them back onto pixels.
    const int iw = a.width(), ih = a.height();
    Image d_mu(iw, ih), d_ea2(iw, ih), d_eab(iw, ih);
    for (size_t i = 0; i < a.size(); ++i) {
        const double mu_a = f.mu_a.data()[i], mu_b = f.mu_b.data()[i];
        const double var_a = f.ea2.data()[i] - mu_a * mu_a;
        const double var_b = f.eb2.data()[i] - mu_b * mu_b;
        const double cov = f.eab.data()[i] - mu_a * mu_b;
        const double a1 = 2.0 * mu_a * mu_b + c1;
        const double a2 = 2.0 * cov + c2;
        const double b1 = mu_a * mu_a + mu_b * mu_b + c1;
        const double b2 = var_a + var_b + c2;
        const double inv = 1.0 / (b1 * b2);
        const double s = (a1 * a2) * inv;
        d_eab.data()[i] = 2.0 * a1 * inv;
        d_ea2.data()[i] = -s / b2;
        d_mu.data()[i] = 2.0 * mu_b * (a2 - a1) * inv - 2.0 * mu_a * s * (b2 - b1) * inv;
    }

    const Image t_mu = window_filter_adjoint(d_mu, w);
    const Image t_ea2 = window_filter_adjoint(d_ea2, w);
    const Image t_eab = window_filter_adjoint(d_eab, w);

    const double scale = upstream / static_cast<double>(a.size());
    Image grad(iw, ih);
    for (size_t i = 0; i < grad.size(); ++i) {
        grad.data()[i] = scale * (t_mu.data()[i] + 2.0 * a.data()[i] * t_ea2.data()[i] +
                                  b.data()[i] * t_eab.data()[i]);
    }
    return grad;
}

int GradientHistogram::bin_of(double g) {
    const int idx = static_cast<int>(std::floor((g + 1.0) * (kBins / 2.0)));
    return std::clamp(idx, 0, kBins - 1);
}

GradientHistogram gradient_histogram(const Image& img) {
    if (img.width() < 2 || img.height() < 2)
        throw config_error("gradient histogram needs at least 2x2 pixels");
    GradientHistogram h;
    h.horizontal.assign(GradientHistogram::kBins, 0.0);
    h.vertical.assign(GradientHistogram::kBins, 0.0);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x + 1 < img.width(); ++x)
            h.horizontal[GradientHistogram::bin_of(img(x + 1, y) - img(x, y))] += 1.0;
    for (int y = 0; y + 1 < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            h.vertical[GradientHistogram::bin_of(img(x, y + 1) - img(x, y))] += 1.0;
    const double nh = static_cast<double>(img.height()) * (img.width() - 1);
    const double nv = static_cast<double>(img.width()) * (img.height() - 1);
    for (double& v : h.horizontal) v /= nh;
    for (double& v : h.vertical) v /= nv;
    return h;
}

void write_histogram_csv(const GradientHistogram& h, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw io_error("cannot write histogram to " + path);
    std::fputs("bin_center,h_count,v_count\n", f);
    for (int i = 0; i < GradientHistogram::kBins; ++i)
        std::fprintf(f, "%.17g,%.17g,%.17g\n", GradientHistogram::bin_center(i),
                     h.horizontal[i], h.vertical[i]);
    std::fclose(f);
}

}  // namespace llf
