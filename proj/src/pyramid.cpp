#include "llf/pyramid.hpp"

#include <cmath>

#include "kernels.hpp"

namespace llf {

using kernels::half_ceil;
using kernels::kDown;
using kernels::kUpEven;
using kernels::kUpOdd;
using kernels::reflect;

namespace {

inline double down_tap(const double* s, int i2, int n, int stride) {
    return kernels::down_tap_f(
        [s, stride](int i) { return s[static_cast<size_t>(i) * stride]; }, i2, n);
}

inline double up_tap(const double* coarse, int f, int n, int stride) {
    return kernels::up_tap_f(
        [coarse, stride](int i) { return coarse[static_cast<size_t>(i) * stride]; }, f, n);
}

constexpr size_t kParallelCutoff = 1 << 14;

}  // namespace

int max_num_levels(int width, int height) {
    // floor(log2(min(w,h))) + 1 halvings keep every level's min dimension >= 1
    int levels = 1;
    int d = std::min(width, height);
    while (d >= 2) {
        d /= 2;
        ++levels;
    }
    return levels;
}

int auto_num_levels(int width, int height) {
    const int m = std::min(width, height);
    int l = static_cast<int>(std::floor(std::log2(static_cast<double>(m)))) - 1;
    const int floor_levels = m >= 16 ? 2 : 1;
    return std::max(l, floor_levels);
}

int resolve_num_levels(int width, int height, int num_levels) {
    if (num_levels == 0) num_levels = auto_num_levels(width, height);
    if (num_levels < 1)
        throw config_error("pyramid needs at least one level");
    if (num_levels > max_num_levels(width, height))
        throw config_error("image " + std::to_string(width) + "x" + std::to_string(height) +
                           " too small for " + std::to_string(num_levels) + " pyramid levels");
    return num_levels;
}

Image downsample(const Image& img) {
    const int w = img.width(), h = img.height();
    const int wc = half_ceil(w), hc = half_ceil(h);

    Image tmp(wc, h);
#pragma omp parallel for schedule(static) if (img.size() >= kParallelCutoff)
    for (int y = 0; y < h; ++y) {
        const double* src = img.row(y);
        double* dst = tmp.row(y);
        for (int i = 0; i < wc; ++i) dst[i] = down_tap(src, 2 * i, w, 1);
    }

    Image out(wc, hc);
#pragma omp parallel for schedule(static) if (img.size() >= kParallelCutoff)
    for (int i = 0; i < hc; ++i) {
        for (int x = 0; x < wc; ++x)
            out(x, i) = down_tap(tmp.data() + x, 2 * i, h, wc);
    }
    return out;
}

Image upsample(const Image& img, int target_width, int target_height) {
    if (half_ceil(target_width) != img.width() || half_ceil(target_height) != img.height())
        throw config_error("upsample target size does not match coarse image");
    const int fw = target_width, fh = target_height;

    Image tmp(fw, img.height());
#pragma omp parallel for schedule(static) if (static_cast<size_t>(fw) * img.height() >= kParallelCutoff)
    for (int y = 0; y < img.height(); ++y) {
        const double* src = img.row(y);
        double* dst = tmp.row(y);
        for (int f = 0; f < fw; ++f) dst[f] = up_tap(src, f, fw, 1);
    }

    Image out(fw, fh);
#pragma omp parallel for schedule(static) if (static_cast<size_t>(fw) * fh >= kParallelCutoff)
    for (int f = 0; f < fh; ++f) {
        for (int x = 0; x < fw; ++x)
            out(x, f) = up_tap(tmp.data() + x, f, fh, fw);
    }
    return out;
}

Image downsample_adjoint(const Image& grad, int fine_width, int fine_height) {
    const int wc = grad.width(), hc = grad.height();
    if (half_ceil(fine_width) != wc || half_ceil(fine_height) != hc)
        throw config_error("downsample_adjoint size mismatch");

    // transpose of the vertical pass, then of the horizontal pass
    Image tmp(wc, fine_height, 0.0);
    for (int i = 0; i < hc; ++i) {
        for (int k = 0; k < 5; ++k) {
            const int y = reflect(2 * i + k - 2, fine_height);
            const double wgt = kDown[k];
            double* dst = tmp.row(y);
            const double* src = grad.row(i);
            for (int x = 0; x < wc; ++x) dst[x] += wgt * src[x];
        }
    }

    Image out(fine_width, fine_height, 0.0);
#pragma omp parallel for schedule(static) if (tmp.size() >= kParallelCutoff)
    for (int y = 0; y < fine_height; ++y) {
        const double* src = tmp.row(y);
        double* dst = out.row(y);
        for (int i = 0; i < wc; ++i) {
            for (int k = 0; k < 5; ++k)
                dst[reflect(2 * i + k - 2, fine_width)] += kDown[k] * src[i];
        }
    }
    return out;
}

Image upsample_adjoint(const Image& grad, int coarse_width, int coarse_height) {
    const int fw = grad.width(), fh = grad.height();
    if (half_ceil(fw) != coarse_width || half_ceil(fh) != coarse_height)
        throw config_error("upsample_adjoint size mismatch");

    // transpose of the vertical expansion
    Image tmp(fw, coarse_height, 0.0);
    for (int f = 0; f < fh; ++f) {
        const double* src = grad.row(f);
        if ((f & 1) == 0) {
            const int rows[3] = {reflect(f - 2, fh) / 2, f / 2, reflect(f + 2, fh) / 2};
            for (int t = 0; t < 3; ++t) {
                double* dst = tmp.row(rows[t]);
                const double wgt = kUpEven[t];
                for (int x = 0; x < fw; ++x) dst[x] += wgt * src[x];
            }
        } else {
            const int rows[2] = {reflect(f - 1, fh) / 2, reflect(f + 1, fh) / 2};
            for (int t = 0; t < 2; ++t) {
                double* dst = tmp.row(rows[t]);
                for (int x = 0; x < fw; ++x) dst[x] += kUpOdd * src[x];
            }
        }
    }

    // transpose of the horizontal expansion
    Image out(coarse_width, coarse_height, 0.0);
#pragma omp parallel for schedule(static) if (tmp.size() >= kParallelCutoff)
    for (int y = 0; y < coarse_height; ++y) {
        const double* src = tmp.row(y);
        double* dst = out.row(y);
        for (int f = 0; f < fw; ++f) {
            if ((f & 1) == 0) {
                dst[reflect(f - 2, fw) / 2] += kUpEven[0] * src[f];
                dst[f / 2] += kUpEven[1] * src[f];
                dst[reflect(f + 2, fw) / 2] += kUpEven[2] * src[f];
            } else {
                dst[reflect(f - 1, fw) / 2] += kUpOdd * src[f];
                dst[reflect(f + 1, fw) / 2] += kUpOdd * src[f];
            }
        }
    }
    return out;
}

GaussianPyramid build_gaussian(const Image& img, int num_levels) {
    num_levels = resolve_num_levels(img.width(), img.height(), num_levels);
    GaussianPyramid pyr;
    pyr.levels.reserve(num_levels);
    pyr.levels.push_back(img);
    for (int l = 1; l < num_levels; ++l)
        pyr.levels.push_back(downsample(pyr.levels.back()));
    return pyr;
}

LaplacianPyramid build_laplacian(const Image& img, int num_levels) {
    GaussianPyramid g = build_gaussian(img, num_levels);
    LaplacianPyramid pyr;
    const int L = static_cast<int>(g.levels.size());
    pyr.bands.reserve(L);
    for (int l = 0; l + 1 < L; ++l) {
        Image up = upsample(g.levels[l + 1], g.levels[l].width(), g.levels[l].height());
        Image band(g.levels[l].width(), g.levels[l].height());
        for (size_t i = 0; i < band.size(); ++i)
            band.data()[i] = g.levels[l].data()[i] - up.data()[i];
        pyr.bands.push_back(std::move(band));
    }
    pyr.bands.push_back(std::move(g.levels.back()));
    return pyr;
}

Image collapse(const LaplacianPyramid& pyr) {
    const int L = static_cast<int>(pyr.bands.size());
    if (L == 0) throw config_error("empty pyramid");
    for (int l = 0; l + 1 < L; ++l) {
        if (half_ceil(pyr.bands[l].width()) != pyr.bands[l + 1].width() ||
            half_ceil(pyr.bands[l].height()) != pyr.bands[l + 1].height())
            throw config_error("inconsistent band dimensions");
    }
    Image out = pyr.bands[L - 1];
    for (int l = L - 2; l >= 0; --l) {
        Image up = upsample(out, pyr.bands[l].width(), pyr.bands[l].height());
        for (size_t i = 0; i < up.size(); ++i) up.data()[i] += pyr.bands[l].data()[i];
        out = std::move(up);
    }
    return out;
}

std::vector<Image> collapse_adjoint(const Image& out_grad,
                                    const std::vector<std::pair<int, int>>& band_sizes) {
    const int L = static_cast<int>(band_sizes.size());
    std::vector<Image> grads;
    grads.reserve(L);
    Image carry = out_grad;
    grads.push_back(carry);
    for (int l = 1; l < L; ++l) {
        carry = upsample_adjoint(carry, band_sizes[l].first, band_sizes[l].second);
        grads.push_back(carry);
    }
    return grads;
}

Image laplacian_adjoint(const std::vector<Image>& band_grads) {
    const int L = static_cast<int>(band_grads.size());
    if (L == 0) throw config_error("empty band gradient list");
    if (L == 1) return band_grads[0];

    // gbar_j accumulates d/dG_j: the band term, minus the expansion adjoint of
    // the finer band, plus the decimation adjoint of the coarser total.
    Image gbar = band_grads[L - 1];
    {
        Image up_t = upsample_adjoint(band_grads[L - 2], gbar.width(), gbar.height());
        for (size_t i = 0; i < gbar.size(); ++i) gbar.data()[i] -= up_t.data()[i];
    }
    for (int j = L - 2; j >= 1; --j) {
        Image next = downsample_adjoint(gbar, band_grads[j].width(), band_grads[j].height());
        for (size_t i = 0; i < next.size(); ++i) next.data()[i] += band_grads[j].data()[i];
        Image up_t = upsample_adjoint(band_grads[j - 1], next.width(), next.height());
        for (size_t i = 0; i < next.size(); ++i) next.data()[i] -= up_t.data()[i];
        gbar = std::move(next);
    }
    Image out = downsample_adjoint(gbar, band_grads[0].width(), band_grads[0].height());
    for (size_t i = 0; i < out.size(); ++i) out.data()[i] += band_grads[0].data()[i];
    return out;
}

}  // namespace llf
