#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "llf/image.hpp"
#include "llf/pyramid.hpp"
#include "llf/remap.hpp"

namespace llf {

struct LlfConfig {
    int num_levels = 0;   // 0 selects the auto rule
    int lut_levels = 64;  // K context samples g_k = k/(K-1) spanning [0,1]
};

// Exact per-coefficient evaluation: every output Laplacian coefficient is
// taken from the pyramid of the image remapped around that coefficient's own
// Gaussian context. Slow by construction; serves as the reference the fast
// path is checked against. Input samples must lie in [-0.25, 1.25].
Image llf_naive(const Image& img, const RemapFunction& remap, const LlfConfig& cfg);

// LUT evaluation: remapped pyramids are precomputed at the K context levels
// and each output coefficient linearly interpolates between the two
// bracketing levels. Context values outside [0,1] clamp to the end
// intervals. Exact for affine remaps at any K.
Image llf_fast(const Image& img, const RemapFunction& remap, const LlfConfig& cfg);

// Everything the reverse pass needs: interpolation structure per band, the
// input, and the remap grid. Identical inputs produce identical tapes.
struct LlfTape {
    int num_levels = 0;
    int lut_levels = 0;
    std::vector<std::pair<int, int>> band_sizes;
    std::vector<std::vector<int>> bank_index;      // per difference band
    std::vector<std::vector<double>> bank_weight;  // weight of bank_index+1
    Image input;
    std::vector<double> table_grid;
    size_t context_clamp_count = 0;
};

// Forward pass recording the tape; output is identical to llf_fast with the
// same tabulated remap.
std::pair<Image, LlfTape> llf_fast_with_tape(const Image& img, const TabulatedRemap& remap,
                                             const LlfConfig& cfg);

// Exact reverse-mode gradient of sum(upstream * output) w.r.t. the remap
// table values.
std::vector<double> llf_backward(const LlfTape& tape, const Image& upstream);

}  // namespace llf
