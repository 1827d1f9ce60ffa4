#pragma once

#include <string>
#include <vector>

#include "llf/image.hpp"

namespace llf {

struct SsimParams {
    int window = 11;
    double window_sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;  // L; stabilizers are (k*L)^2
};

double mse(const Image& a, const Image& b);

// Per-pixel SSIM with Gaussian-weighted local statistics, reflect-101
// borders. Values lie in [-1, 1].
Image ssim_map(const Image& a, const Image& b, const SsimParams& p = {});

double mssim(const Image& a, const Image& b, const SsimParams& p = {});

// Analytic d(upstream * MSSIM)/da, exact including border pixels.
Image mssim_backward(const Image& a, const Image& b, const SsimParams& p, double upstream);

struct GradientHistogram {
    static constexpr int kBins = 256;
    std::vector<double> horizontal;  // normalized to sum 1
    std::vector<double> vertical;

    static double bin_center(int i) { return -1.0 + (i + 0.5) * (2.0 / kBins); }
    static int bin_of(double g);
};

// Signed forward differences binned uniformly over [-1, 1]; out-of-range
// gradients clamp to the end bins. Needs at least 2x2 pixels.
GradientHistogram gradient_histogram(const Image& img);

void write_histogram_csv(const GradientHistogram& h, const std::string& path);

}  // namespace llf
