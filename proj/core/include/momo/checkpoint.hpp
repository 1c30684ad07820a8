#pragma once

#include <filesystem>
#include <string>

#include "momo/predictor.hpp"

namespace momo {

struct Checkpoint {
  PredictorHandle handle;
  TrainConfig config;
  int schema_version = 1;
};

/// One JSON document holding every parameter array, the scaler, the training
/// config and a schema version. Loading reproduces predictions bit for bit.
std::string checkpoint_to_json(const PredictorHandle& handle, const TrainConfig& config);
Checkpoint checkpoint_from_json(const std::string& text);

void save_checkpoint(const PredictorHandle& handle, const TrainConfig& config,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace momo
