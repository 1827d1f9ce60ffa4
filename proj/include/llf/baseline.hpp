#pragma once

#include <utility>
#include <vector>

#include "llf/filter.hpp"
#include "llf/image.hpp"
#include "llf/metrics.hpp"
#include "llf/remap.hpp"

namespace llf {

// Training-free reference: derive a fixed remap by matching the signed
// gradient histograms of input and target. The transfer
// CDF_target^-1 o CDF_input is odd-symmetrized and anchored at r(0)=0, so the
// resulting curve is monotone non-decreasing by construction.
struct BaselineFit {
    RemapCurve curve;
    bool degenerate = false;  // both histograms collapsed to a single bin
};

BaselineFit fit_gradient_remap(const Image& input, const Image& target, int bins = 256);

// Pooled variant over several pairs: histograms are accumulated across all
// inputs and all targets before the single transfer is built.
BaselineFit fit_gradient_remap(const std::vector<std::pair<Image, Image>>& pairs,
                               int bins = 256);

Image apply_baseline(const Image& img, const RemapCurve& curve, const LlfConfig& cfg);

}  // namespace llf
