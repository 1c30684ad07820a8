#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "momo/backtest.hpp"
#include "momo/market_data.hpp"
#include "momo/predictor.hpp"

namespace momo {

/// Exactly one of csv_dir / synthetic must be set.
struct DataSource {
  std::optional<std::filesystem::path> csv_dir;
  std::optional<SyntheticSpec> synthetic;
};

/// The one document that drives a whole run; the manifest echoes it verbatim.
struct RunConfig {
  DataSource data_source;
  int train_size = 240;
  int horizon = 10;
  int window_len = 10;
  TrainConfig lstm;
  FilterConfig filter;
  double equity_initial = 1'000'000.0;
  double commission_rate = 0.0001;
  int group_len = 84;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = number of processor cores
  std::string predictor = "lstm";
};

/// Parse the JSON config document. Unknown keys anywhere are a hard error;
/// absent keys take the documented defaults. Throws ConfigError.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical JSON echo of a config (the manifest/report embed this).
std::string run_config_to_json(const RunConfig& config);

void validate_run_config(const RunConfig& config);

}  // namespace momo
