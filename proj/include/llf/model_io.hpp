#pragma once

#include <string>

#include "llf/train.hpp"

namespace llf {

// Manifest JSON at `path`. Network weights go to a little-endian 64-bit
// sidecar blob next to it, referenced by relative name and pinned by a
// content hash. Reloading reproduces the model bit-exactly.
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

// One JSON record per epoch: {epoch, mean_loss, mse_term, mssim_term}.
void write_loss_log(const TrainedModel& model, const std::string& path);

std::string eval_report_json(const EvalReport& rep, const TrainedModel& model);

uint64_t fnv1a64(const void* data, size_t len);

}  // namespace llf
