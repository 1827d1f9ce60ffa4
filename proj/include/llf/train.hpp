#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "llf/filter.hpp"
#include "llf/imageio.hpp"
#include "llf/metrics.hpp"
#include "llf/mlp.hpp"
#include "llf/remap.hpp"

namespace llf {

// Trainable affine output stage applied after the filter.
struct NormLayer {
    double gamma = 1.0;
    double omega = 0.0;
};

enum class RemapKind { orig, mlp };

struct TrainConfig {
    RemapKind remap_kind = RemapKind::orig;
    bool norm_enabled = true;
    double lr = 1e-4;
    int epochs = 300;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    LlfConfig llf;
    int table_size = 1024;
    uint64_t seed = 0;
};

// "M|N" / "M|-" / "R|N" / "R|-": network or three-parameter remap, with or
// without the normalization layer. Lowercase aliases mn/m-/rn/r- accepted.
std::pair<RemapKind, bool> parse_config_name(const std::string& name);
std::string config_name(RemapKind kind, bool norm_enabled);

struct EpochRecord {
    int epoch;
    double mean_loss;
    double mse_term;
    double mssim_term;
};

struct TrainedModel {
    RemapKind kind = RemapKind::orig;
    OrigRemap orig;
    MlpRemap mlp;  // inference mode, running statistics frozen
    bool norm_enabled = true;
    NormLayer norm;
    TrainConfig config;
    double final_loss = 0.0;
    std::vector<EpochRecord> history;
    RemapCurve curve;
    MonotonicityReport monotonicity;
    int pretrain_steps = 0;
    double pretrain_error = 0.0;
    int beta_projections = 0;  // times beta had to be clipped back to >= 0

    const RemapFunction& remap() const {
        if (kind == RemapKind::orig) return orig;
        return mlp;
    }
};

// MSE(out, target) + 1 - MSSIM(out, target) and its exact gradient w.r.t.
// every output pixel. Images must match and be at least 11x11.
std::pair<double, Image> loss_and_grad(const Image& out, const Image& target);
// The two terms separately, for logging.
std::pair<double, double> loss_terms(const Image& out, const Image& target);

// Inference-path forward: filter with the tabulated remap, then the affine
// normalization.
Image forward(const Image& img, const TrainedModel& model);

// Gradients of a scalar loss w.r.t. every trainable parameter given the
// pipeline tape and d(loss)/d(output). Shared by the fit loop and by the
// gradient checks.
struct PipelineGrads {
    std::vector<double> remap;  // (sigma, alpha, beta) or flat network params
    double gamma = 0.0;
    double omega = 0.0;
};

std::pair<double, double> norm_backward(const Image& out_grad, const Image& llf_out);

TrainedModel fit(const PairedDataset& data, const TrainConfig& cfg);

struct EvalPair {
    double ssim;
    double mse;
};
struct EvalReport {
    std::vector<EvalPair> pairs;
    double mean_ssim = 0.0, stddev_ssim = 0.0;
    double mean_mse = 0.0, stddev_mse = 0.0;
};

EvalReport evaluate(const PairedDataset& data, const TrainedModel& model);

}  // namespace llf
