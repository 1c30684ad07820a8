#include "momo/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "momo/errors.hpp"

namespace momo {
namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

json scaler_to_json(const Scaler& scaler) {
  json j;
  j["mean"] = scaler.mean;
  j["scale"] = scaler.scale;
  j["degenerate"] = scaler.degenerate;
  return j;
}

Scaler scaler_from_json(const json& j) {
  Scaler scaler;
  const auto mean = j.at("mean").get<std::vector<double>>();
  const auto scale = j.at("scale").get<std::vector<double>>();
  const auto degenerate = j.at("degenerate").get<std::vector<bool>>();
  if (mean.size() != kFeatureCount || scale.size() != kFeatureCount ||
      degenerate.size() != kFeatureCount) {
    throw DataError("checkpoint: scaler arrays must have 6 entries");
  }
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    scaler.mean[f] = mean[f];
    scaler.scale[f] = scale[f];
    scaler.degenerate[f] = degenerate[f];
  }
  return scaler;
}

json train_config_to_json(const TrainConfig& c) {
  json j;
  j["epochs"] = c.epochs;
  j["batch"] = c.batch;
  j["learning_rate"] = c.learning_rate;
  j["optimizer"] = c.optimizer;
  j["seed"] = c.seed;
  j["init_scale"] = c.init_scale;
  j["forget_bias_offset"] = c.forget_bias_offset;
  j["grad_clip_norm"] = c.grad_clip_norm;
  j["hidden_dim"] = c.hidden_dim;
  return j;
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  c.epochs = j.at("epochs").get<int>();
  c.batch = j.at("batch").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.optimizer = j.at("optimizer").get<std::string>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.init_scale = j.at("init_scale").get<double>();
  c.forget_bias_offset = j.at("forget_bias_offset").get<double>();
  c.grad_clip_norm = j.at("grad_clip_norm").get<double>();
  c.hidden_dim = j.at("hidden_dim").get<int>();
  return c;
}

}  // namespace

std::string checkpoint_to_json(const PredictorHandle& handle, const TrainConfig& config) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = to_string(handle.kind);
  j["input_dim"] = handle.params.input_dim;
  j["hidden_dim"] = handle.params.hidden_dim;
  json params;
  for (const auto& [name, span] : named_param_spans(handle.params)) {
    params[name] = std::vector<double>(span.begin(), span.end());
  }
  j["params"] = std::move(params);
  j["scaler"] = scaler_to_json(handle.scaler);
  j["train_config"] = train_config_to_json(config);
  return j.dump(2);
}

Checkpoint checkpoint_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: invalid JSON: ") + e.what());
  }
  try {
    Checkpoint cp;
    cp.schema_version = j.at("schema_version").get<int>();
    if (cp.schema_version != kSchemaVersion) {
      throw DataError("checkpoint: unsupported schema version " +
                      std::to_string(cp.schema_version));
    }
    cp.handle.kind = predictor_kind_from_string(j.at("kind").get<std::string>());
    const int input_dim = j.at("input_dim").get<int>();
    const int hidden_dim = j.at("hidden_dim").get<int>();
    cp.handle.params = LstmParams::zeros(input_dim, hidden_dim);
    const json& params = j.at("params");
    for (auto& [name, span] : named_param_spans(cp.handle.params)) {
      const auto values = params.at(name).get<std::vector<double>>();
      if (values.size() != span.size()) {
        throw DataError(std::string("checkpoint: array '") + name + "' has " +
                        std::to_string(values.size()) + " entries, expected " +
                        std::to_string(span.size()));
      }
      std::copy(values.begin(), values.end(), span.begin());
    }
    cp.handle.scaler = scaler_from_json(j.at("scaler"));
    cp.config = train_config_from_json(j.at("train_config"));
    return cp;
  } catch (const json::exception& e) {
    throw DataError(std::string("checkpoint: malformed document: ") + e.what());
  }
}

void save_checkpoint(const PredictorHandle& handle, const TrainConfig& config,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("checkpoint: cannot open " + path.string() + " for writing");
  out << checkpoint_to_json(handle, config) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("checkpoint: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return checkpoint_from_json(text);
}

}  // namespace momo
