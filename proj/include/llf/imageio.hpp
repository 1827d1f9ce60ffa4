#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "llf/image.hpp"

namespace llf {

// Supported formats: PGM (P2/P5, maxval 255 or 65535, big-endian 16-bit P5),
// single-channel 8/16-bit PNG, and a headerless CSV matrix of reals in [0,1]
// for exact-value fixtures. Integer samples scale to [0,1] by 1/maxval.
Image load_image(const std::string& path);

// Samples are clipped to [0,1], then quantized round-half-up to the given
// depth. CSV output skips quantization and writes exact values instead.
void save_image(const Image& img, const std::string& path, int depth = 16);

struct SynthStyleParams {
    double sigma = 0.2;
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double omega = 0.0;
};

// Deterministic phantom + its styled counterpart. The input is a sum of
// random Gaussian blobs plus low-amplitude noise rescaled to [0.05, 0.95];
// the target is the exact per-coefficient filter with the hidden parameters,
// followed by the affine normalization. Rejects sizes below 16 px.
std::pair<Image, Image> synth_pair(uint64_t seed, int width, int height,
                                   const SynthStyleParams& style);

struct PairedDataset {
    std::vector<std::pair<Image, Image>> pairs;  // (input, target), sizes match per pair
    std::string split;                           // "train" or "test"
};

// On-disk dataset layout produced by the synth command: numbered image pairs
// plus manifest.json recording the generator parameters and split tags.
struct DatasetManifest {
    uint64_t seed = 0;
    int count = 0;
    int width = 0;
    int height = 0;
    SynthStyleParams style;
    std::vector<std::string> input_files;
    std::vector<std::string> target_files;
    std::vector<std::string> splits;
};

void write_dataset(const std::string& dir, const DatasetManifest& manifest,
                   const std::vector<std::pair<Image, Image>>& pairs, int depth,
                   const std::string& format);
DatasetManifest read_dataset_manifest(const std::string& dir);
PairedDataset load_dataset(const std::string& dir, const std::string& split);

}  // namespace llf
