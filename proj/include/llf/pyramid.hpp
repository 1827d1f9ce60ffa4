#pragma once

#include <utility>
#include <vector>

#include "llf/image.hpp"

namespace llf {

// Burt-Adelson pyramids on the separable binomial kernel [1,4,6,4,1]/16 with
// reflect-101 borders. Levels halve with ceil division; upsampling targets
// the recorded size of the finer level, so reconstruction is exact for
// arbitrary sizes.

struct GaussianPyramid {
    std::vector<Image> levels;  // levels[0] is the input at full resolution
};

struct LaplacianPyramid {
    // bands[k] = gaussian[k] - upsample(gaussian[k+1]) for k < top;
    // bands[top] is the Gaussian residual.
    std::vector<Image> bands;
};

// Largest feasible level count: every halving acts on a dimension >= 2.
int max_num_levels(int width, int height);

// floor(log2(min(w,h))) - 1, clamped to >= 2 for images >= 16 px
// (>= 1 below that).
int auto_num_levels(int width, int height);

// num_levels == 0 selects the auto rule.
int resolve_num_levels(int width, int height, int num_levels);

Image downsample(const Image& img);
Image upsample(const Image& img, int target_width, int target_height);

// Exact adjoints of the two linear resamplers, used by reverse-mode passes.
Image downsample_adjoint(const Image& grad, int fine_width, int fine_height);
Image upsample_adjoint(const Image& grad, int coarse_width, int coarse_height);

GaussianPyramid build_gaussian(const Image& img, int num_levels);
LaplacianPyramid build_laplacian(const Image& img, int num_levels);
Image collapse(const LaplacianPyramid& pyr);

// Adjoint of collapse: scatter a gradient w.r.t. the collapsed image into
// per-band gradients. band_sizes lists (width, height) per band.
std::vector<Image> collapse_adjoint(const Image& out_grad,
                                    const std::vector<std::pair<int, int>>& band_sizes);

// Adjoint of build_laplacian: fold per-band gradients back onto the input
// image the pyramid was built from.
Image laplacian_adjoint(const std::vector<Image>& band_grads);

}  // namespace llf
