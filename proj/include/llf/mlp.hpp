#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "llf/remap.hpp"

namespace llf {

// Scalar-to-scalar network standing in for the three-parameter remap:
// hidden widths 3, 12, 24, 24, 12, 3 with batch normalization and ReLU on
// every hidden layer, bare affine 3->1 output. In training mode batch
// statistics normalize; in inference mode the frozen running statistics do,
// making the network a deterministic function of a single scalar.
class MlpRemap final : public RemapFunction {
public:
    enum class Mode { training, inference };

    static constexpr int kNumLayers = 7;  // affine layers, 1->3->12->24->24->12->3->1
    static constexpr std::array<int, kNumLayers + 1> kWidths{1, 3, 12, 24, 24, 12, 3, 1};
    static constexpr int kNumHidden = kNumLayers - 1;
    static constexpr double kBnEpsilon = 1e-5;
    static constexpr double kBnMomentum = 0.1;

    struct Layer {
        int in = 0, out = 0;
        std::vector<double> weight;  // row-major, out x in
        std::vector<double> bias;
    };
    struct BatchNorm {
        std::vector<double> scale, shift, running_mean, running_var;
    };

    MlpRemap();  // zero weights, unit batch-norm, inference mode
    static MlpRemap he_uniform(uint64_t seed);

    Mode mode() const { return mode_; }
    void set_mode(Mode m) { mode_ = m; }

    // RemapFunction surface; inference mode only.
    double eval1(double delta) const override;
    void eval(std::span<const double> delta, std::span<double> out) const override;

    struct ForwardCache {
        int batch = 0;
        std::array<std::vector<double>, kNumLayers> inputs;  // activations fed to each layer
        std::array<std::vector<double>, kNumHidden> xhat;
        std::array<std::vector<double>, kNumHidden> inv_std;
        std::array<std::vector<char>, kNumHidden> relu_mask;
    };

    // Training mode uses batch statistics (batch >= 2) and optionally updates
    // the running estimates; inference mode ignores both flags.
    std::vector<double> forward(std::span<const double> deltas, ForwardCache* cache,
                                bool update_running);

    struct Gradients {
        std::vector<double> trainable;  // same order as copy_trainable
        std::vector<double> inputs;
    };

    // Exact reverse-mode gradients for the cached training-mode forward,
    // including the batch-statistics terms of batch normalization.
    Gradients backward(const ForwardCache& cache, std::span<const double> upstream) const;

    size_t num_trainable() const;
    void copy_trainable(std::span<double> out) const;
    void apply_trainable(std::span<const double> in);

    // Trainable parameters followed by running statistics, fixed order.
    std::vector<double> state_blob() const;
    void load_state_blob(std::span<const double> blob);

    const Layer& layer(int l) const { return layers_[l]; }
    const BatchNorm& batch_norm(int h) const { return bn_[h]; }

private:
    std::array<Layer, kNumLayers> layers_;
    std::array<BatchNorm, kNumHidden> bn_;
    Mode mode_ = Mode::inference;
};

struct PretrainResult {
    MlpRemap net;
    int steps = 0;
    double max_abs_error = 0.0;
};

// Fits a fresh He-uniform network to the identity on [-1, 1]: Adam at
// lr 1e-3 on random batches until the inference-mode error on a 1024-point
// grid drops to 5e-3, or 20000 steps. Throws numeric_error with the achieved
// error when the budget runs out.
PretrainResult pretrain_identity(uint64_t seed);

}  // namespace llf
