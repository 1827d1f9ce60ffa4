#include "llf/filter.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

#include "kernels.hpp"

namespace llf {

using kernels::reflect;

namespace {

struct Range {
    int lo = 0, hi = 0;  // inclusive
    int len() const { return hi - lo + 1; }
};

// Fine-domain indices a coarse range [a,b] pulls through the decimating tap.
// Reflected gathers land inside this interval as well.
Range down_requirement(Range coarse, int fine_n) {
    return {std::max(0, 2 * coarse.lo - 2), std::min(fine_n - 1, 2 * coarse.hi + 2)};
}

// Coarse indices the expansion at fine index f touches.
Range up_requirement(int f, int fine_n) {
    Range r{INT_MAX, INT_MIN};
    for (int k = -2; k <= 2; ++k) {
        const int rf = reflect(f + k, fine_n);
        if ((rf & 1) != 0) continue;
        r.lo = std::min(r.lo, rf / 2);
        r.hi = std::max(r.hi, rf / 2);
    }
    return r;
}

struct Window {
    Range rx, ry;
    std::vector<double> data;

    double at(int x, int y) const {
        return data[static_cast<size_t>(y - ry.lo) * rx.len() + (x - rx.lo)];
    }
    double& ref(int x, int y) {
        return data[static_cast<size_t>(y - ry.lo) * rx.len() + (x - rx.lo)];
    }
    void alloc() { data.resize(static_cast<size_t>(ry.len()) * rx.len()); }
};

// Decimate a window of level j onto the requested window of level j+1. Taps
// and pass order match the full-image pyramid, so values are bit-identical
// to building the whole pyramid and reading the window out of it.
Window downsample_window(const Window& src, Range dst_x, Range dst_y, int fine_w, int fine_h) {
    Window tmp;  // horizontal pass: fine rows, coarse columns
    tmp.rx = dst_x;
    tmp.ry = src.ry;
    tmp.alloc();
    for (int y = src.ry.lo; y <= src.ry.hi; ++y) {
        for (int i = dst_x.lo; i <= dst_x.hi; ++i) {
            tmp.ref(i, y) = kernels::down_tap_f(
                [&](int fx) { return src.at(fx, y); }, 2 * i, fine_w);
        }
    }

    Window out;
    out.rx = dst_x;
    out.ry = dst_y;
    out.alloc();
    for (int i = dst_y.lo; i <= dst_y.hi; ++i) {
        for (int x = dst_x.lo; x <= dst_x.hi; ++x) {
            out.ref(x, i) = kernels::down_tap_f(
                [&](int fy) { return tmp.at(x, fy); }, 2 * i, fine_h);
        }
    }
    return out;
}

// Expansion of a coarse window evaluated at one fine position, matching the
// full-image upsample (horizontal pass, then vertical).
double expand_at(const Window& coarse, int px, int py, int fine_w, int fine_h) {
    auto hval = [&](int cy) {
        return kernels::up_tap_f([&](int cx) { return coarse.at(cx, cy); }, px, fine_w);
    };
    return kernels::up_tap_f(hval, py, fine_h);
}

void check_input_range(const Image& img) {
    for (double v : img.pixels()) {
        if (!(v >= -0.25 && v <= 1.25))
            throw config_error("input sample " + std::to_string(v) +
                               " outside the supported range [-0.25, 1.25]");
    }
}

void check_lut_levels(int k) {
    if (k < 2) throw config_error("lut_levels must be at least 2");
}

// Shared fast-path core; fills the tape when given one.
Image llf_fast_core(const Image& img, const RemapFunction& remap, const LlfConfig& cfg,
                    LlfTape* tape) {
    check_input_range(img);
    check_lut_levels(cfg.lut_levels);
    const int L = resolve_num_levels(img.width(), img.height(), cfg.num_levels);
    const int K = cfg.lut_levels;
    const GaussianPyramid context = build_gaussian(img, L);

    // (1) remapped Laplacian pyramid per context level
    std::vector<LaplacianPyramid> banks(K);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < K; ++k) {
        const double g = static_cast<double>(k) / (K - 1);
        Image remapped(img.width(), img.height());
        std::vector<double> delta(img.size());
        for (size_t i = 0; i < img.size(); ++i) delta[i] = img.data()[i] - g;
        remap.eval(delta, remapped.pixels());
        for (size_t i = 0; i < remapped.size(); ++i) remapped.data()[i] += g;
        banks[k] = build_laplacian(remapped, L);
    }

    // (2) assemble output coefficients by interpolating across context
    LaplacianPyramid out;
    out.bands.resize(L);
    size_t clamped = 0;
    if (tape) {
        tape->num_levels = L;
        tape->lut_levels = K;
        tape->bank_index.resize(L - 1);
        tape->bank_weight.resize(L - 1);
    }
    for (int l = 0; l + 1 < L; ++l) {
        const Image& ctx = context.levels[l];
        const int w = ctx.width(), h = ctx.height();
        out.bands[l] = Image(w, h);
        std::vector<int>* idx = nullptr;
        std::vector<double>* wgt = nullptr;
        if (tape) {
            tape->bank_index[l].resize(static_cast<size_t>(w) * h);
            tape->bank_weight[l].resize(static_cast<size_t>(w) * h);
            idx = &tape->bank_index[l];
            wgt = &tape->bank_weight[l];
        }
        size_t band_clamped = 0;
#pragma omp parallel for schedule(static) reduction(+ : band_clamped)
        for (int p = 0; p < w * h; ++p) {
            const double g = ctx.data()[p];
            double gc = g;
            if (gc < 0.0 || gc > 1.0) {
                gc = std::clamp(gc, 0.0, 1.0);
                ++band_clamped;
            }
            const double pos = gc * (K - 1);
            const int k = std::min(static_cast<int>(std::floor(pos)), K - 2);
            const double u = pos - k;
            out.bands[l].data()[p] = (1.0 - u) * banks[k].bands[l].data()[p] +
                                     u * banks[k + 1].bands[l].data()[p];
            if (idx) {
                (*idx)[p] = k;
                (*wgt)[p] = u;
            }
        }
        clamped += band_clamped;
    }
    out.bands[L - 1] = context.levels[L - 1];

    if (tape) {
        tape->band_sizes.clear();
        for (const Image& b : out.bands) tape->band_sizes.emplace_back(b.width(), b.height());
        tape->input = img;
        tape->context_clamp_count = clamped;
    }
    return collapse(out);
}

}  // namespace

Image llf_naive(const Image& img, const RemapFunction& remap, const LlfConfig& cfg) {
    check_input_range(img);
    const int L = resolve_num_levels(img.width(), img.height(), cfg.num_levels);
    const GaussianPyramid context = build_gaussian(img, L);

    std::vector<std::pair<int, int>> sizes;
    for (const Image& lvl : context.levels) sizes.emplace_back(lvl.width(), lvl.height());

    LaplacianPyramid out;
    out.bands.resize(L);
    for (int l = 0; l + 1 < L; ++l) {
        const int w = sizes[l].first, h = sizes[l].second;
        out.bands[l] = Image(w, h);
        Image& band = out.bands[l];

#pragma omp parallel for schedule(dynamic, 16)
        for (int p = 0; p < w * h; ++p) {
            const int px = p % w, py = p / w;
            const double g = context.levels[l](px, py);

            // window extents per level, walked down from the coarse end
            std::vector<Range> wx(l + 2), wy(l + 2);
            wx[l + 1] = up_requirement(px, w);
            wy[l + 1] = up_requirement(py, h);
            wx[l] = down_requirement(wx[l + 1], w);
            wy[l] = down_requirement(wy[l + 1], h);
            wx[l].lo = std::min(wx[l].lo, px);
            wx[l].hi = std::max(wx[l].hi, px);
            wy[l].lo = std::min(wy[l].lo, py);
            wy[l].hi = std::max(wy[l].hi, py);
            for (int j = l - 1; j >= 0; --j) {
                wx[j] = down_requirement(wx[j + 1], sizes[j].first);
                wy[j] = down_requirement(wy[j + 1], sizes[j].second);
            }

            // remap the level-0 window around this coefficient's own context
            Window win;
            win.rx = wx[0];
            win.ry = wy[0];
            win.alloc();
            std::vector<double> delta(win.data.size());
            for (int y = win.ry.lo; y <= win.ry.hi; ++y)
                for (int x = win.rx.lo; x <= win.rx.hi; ++x)
                    delta[static_cast<size_t>(y - win.ry.lo) * win.rx.len() + (x - win.rx.lo)] =
                        img(x, y) - g;
            remap.eval(delta, win.data);
            for (double& v : win.data) v += g;

            for (int j = 0; j < l; ++j)
                win = downsample_window(win, wx[j + 1], wy[j + 1],
                                        sizes[j].first, sizes[j].second);
            const Window top =
                downsample_window(win, wx[l + 1], wy[l + 1], sizes[l].first, sizes[l].second);
            band(px, py) = win.at(px, py) - expand_at(top, px, py, w, h);
        }
    }

    out.bands[L - 1] = context.levels[L - 1];
    return collapse(out);
}

Image llf_fast(const Image& img, const RemapFunction& remap, const LlfConfig& cfg) {
    return llf_fast_core(img, remap, cfg, nullptr);
}

std::pair<Image, LlfTape> llf_fast_with_tape(const Image& img, const TabulatedRemap& remap,
                                             const LlfConfig& cfg) {
    LlfTape tape;
    Image out = llf_fast_core(img, remap, cfg, &tape);
    tape.table_grid = remap.curve().grid;
    return {std::move(out), std::move(tape)};
}

std::vector<double> llf_backward(const LlfTape& tape, const Image& upstream) {
    const int L = tape.num_levels;
    const int K = tape.lut_levels;
    if (L < 1 || K < 2 || tape.table_grid.size() < 2)
        throw config_error("backward pass needs a tape from llf_fast_with_tape");
    if (upstream.width() != tape.band_sizes[0].first ||
        upstream.height() != tape.band_sizes[0].second)
        throw config_error("upstream gradient size does not match taped output");

    const std::vector<Image> band_grads = collapse_adjoint(upstream, tape.band_sizes);
    const auto& grid = tape.table_grid;
    const int n = static_cast<int>(grid.size());

    // Per-bank partial table gradients, reduced in a fixed order afterwards
    // so the result is independent of thread count.
    std::vector<std::vector<double>> partial(K, std::vector<double>(n, 0.0));
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < K; ++k) {
        std::vector<Image> bg(L);
        bool touched = false;
        for (int l = 0; l < L; ++l) {
            bg[l] = Image(tape.band_sizes[l].first, tape.band_sizes[l].second, 0.0);
            if (l + 1 == L) continue;  // residual band carries no table gradient
            const auto& idx = tape.bank_index[l];
            const auto& wgt = tape.bank_weight[l];
            for (size_t p = 0; p < idx.size(); ++p) {
                if (idx[p] == k) {
                    bg[l].data()[p] += (1.0 - wgt[p]) * band_grads[l].data()[p];
                    touched = true;
                } else if (idx[p] + 1 == k) {
                    bg[l].data()[p] += wgt[p] * band_grads[l].data()[p];
                    touched = true;
                }
            }
        }
        if (!touched) continue;

        const Image g_remapped = laplacian_adjoint(bg);
        const double g = static_cast<double>(k) / (K - 1);
        auto& tg = partial[k];
        for (size_t i = 0; i < g_remapped.size(); ++i) {
            const double d = tape.input.data()[i] - g;
            int j;
            double u;
            table_lookup(grid, d, j, u);
            tg[j] += (1.0 - u) * g_remapped.data()[i];
            tg[j + 1] += u * g_remapped.data()[i];
        }
    }

    std::vector<double> table_grad(n, 0.0);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < n; ++j) table_grad[j] += partial[k][j];
    return table_grad;
}

}  // namespace llf
