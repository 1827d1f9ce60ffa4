#include "oracles.hpp"

#include <cmath>

namespace oracle {

namespace {

const double kKernel1d[5] = {1.0, 4.0, 6.0, 4.0, 1.0};

int half_ceil(int n) { return (n + 1) / 2; }

}  // namespace

int reflect101(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
    }
    return i;
}

llf::Image downsample_direct(const llf::Image& img) {
    const int w = img.width(), h = img.height();
    llf::Image out(half_ceil(w), half_ceil(h));
    for (int yc = 0; yc < out.height(); ++yc) {
        for (int xc = 0; xc < out.width(); ++xc) {
            double acc = 0.0;
            for (int j = 0; j < 5; ++j)
                for (int k = 0; k < 5; ++k)
                    acc += kKernel1d[j] * kKernel1d[k] *
                           img(reflect101(2 * xc + k - 2, w), reflect101(2 * yc + j - 2, h));
            out(xc, yc) = acc / 256.0;
        }
    }
    return out;
}

llf::Image upsample_direct(const llf::Image& img, int target_w, int target_h) {
    // zero-inserted grid, then the same kernel scaled x2 per axis
    llf::Image out(target_w, target_h);
    auto z = [&](int x, int y) {
        x = reflect101(x, target_w);
        y = reflect101(y, target_h);
        if ((x & 1) || (y & 1)) return 0.0;
        return img(x / 2, y / 2);
    };
    for (int y = 0; y < target_h; ++y) {
        for (int x = 0; x < target_w; ++x) {
            double acc = 0.0;
            for (int j = 0; j < 5; ++j)
                for (int k = 0; k < 5; ++k)
                    acc += kKernel1d[j] * kKernel1d[k] * z(x + k - 2, y + j - 2);
            out(x, y) = acc * 4.0 / 256.0;
        }
    }
    return out;
}

std::vector<llf::Image> gaussian_direct(const llf::Image& img, int levels) {
    std::vector<llf::Image> g{img};
    for (int l = 1; l < levels; ++l) g.push_back(downsample_direct(g.back()));
    return g;
}

std::vector<llf::Image> laplacian_direct(const llf::Image& img, int levels) {
    std::vector<llf::Image> g = gaussian_direct(img, levels);
    std::vector<llf::Image> bands;
    for (int l = 0; l + 1 < levels; ++l) {
        llf::Image up = upsample_direct(g[l + 1], g[l].width(), g[l].height());
        llf::Image band(g[l].width(), g[l].height());
        for (size_t i = 0; i < band.size(); ++i)
            band.data()[i] = g[l].data()[i] - up.data()[i];
        bands.push_back(std::move(band));
    }
    bands.push_back(g.back());
    return bands;
}

llf::Image collapse_direct(const std::vector<llf::Image>& bands) {
    llf::Image out = bands.back();
    for (int l = static_cast<int>(bands.size()) - 2; l >= 0; --l) {
        llf::Image up = upsample_direct(out, bands[l].width(), bands[l].height());
        for (size_t i = 0; i < up.size(); ++i) up.data()[i] += bands[l].data()[i];
        out = std::move(up);
    }
    return out;
}

llf::Image llf_reference(const llf::Image& img, const llf::RemapFunction& remap, int levels) {
    const std::vector<llf::Image> context = gaussian_direct(img, levels);
    std::vector<llf::Image> out_bands;
    for (int l = 0; l + 1 < levels; ++l) {
        const int w = context[l].width(), h = context[l].height();
        llf::Image band(w, h);
        for (int py = 0; py < h; ++py) {
            for (int px = 0; px < w; ++px) {
                const double g = context[l](px, py);
                llf::Image remapped(img.width(), img.height());
                for (size_t i = 0; i < img.size(); ++i)
                    remapped.data()[i] = g + remap.eval1(img.data()[i] - g);
                const std::vector<llf::Image> bands = laplacian_direct(remapped, levels);
                band(px, py) = bands[l](px, py);
            }
        }
        out_bands.push_back(std::move(band));
    }
    out_bands.push_back(context.back());
    return collapse_direct(out_bands);
}

double ssim_at(const llf::Image& a, const llf::Image& b, int px, int py) {
    const int w = a.width(), h = a.height();
    double weights[11][11];
    double wsum = 0.0;
    for (int j = 0; j < 11; ++j)
        for (int k = 0; k < 11; ++k) {
            weights[j][k] = std::exp(-((j - 5.0) * (j - 5.0) + (k - 5.0) * (k - 5.0)) /
                                     (2.0 * 1.5 * 1.5));
            wsum += weights[j][k];
        }

    double mu_a = 0.0, mu_b = 0.0, ea2 = 0.0, eb2 = 0.0, eab = 0.0;
    for (int j = 0; j < 11; ++j) {
        for (int k = 0; k < 11; ++k) {
            const double wgt = weights[j][k] / wsum;
            const double va = a(reflect101(px + k - 5, w), reflect101(py + j - 5, h));
            const double vb = b(reflect101(px + k - 5, w), reflect101(py + j - 5, h));
            mu_a += wgt * va;
            mu_b += wgt * vb;
            ea2 += wgt * va * va;
            eb2 += wgt * vb * vb;
            eab += wgt * va * vb;
        }
    }
    const double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    const double var_a = ea2 - mu_a * mu_a;
    const double var_b = eb2 - mu_b * mu_b;
    const double cov = eab - mu_a * mu_b;
    return ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
           ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
}

double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

double cdf_eval(const std::vector<double>& bin_mass, double v) {
    const int bins = static_cast<int>(bin_mass.size());
    if (v <= -1.0) return 0.0;
    if (v >= 1.0) return 1.0;
    const double pos = (v + 1.0) / 2.0 * bins;
    const int j = std::min(static_cast<int>(pos), bins - 1);
    double acc = 0.0;
    for (int i = 0; i < j; ++i) acc += bin_mass[i];
    return acc + bin_mass[j] * (pos - j);
}

double cdf_inverse_scan(const std::vector<double>& bin_mass, double u) {
    const int steps = 400000;
    for (int s = 0; s <= steps; ++s) {
        const double x = -1.0 + 2.0 * s / steps;
        if (cdf_eval(bin_mass, x) >= u) return x;
    }
    return 1.0;
}

}  // namespace oracle
