#include "momo/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "momo/errors.hpp"

namespace momo {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (known.find(key) == known.end()) {
      throw ConfigError("config: unknown key '" + key + "' in " + where);
    }
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) {
    try {
      out = j.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(std::string("config: bad value for '") + key + "'");
    }
  }
}

SyntheticSpec parse_synthetic_spec(const json& j) {
  reject_unknown_keys(j,
                      {"n_tickers", "n_days", "seed", "phi1", "phi2", "sigma", "init_price",
                       "base_volume", "volume_noise"},
                      "data_source.synthetic");
  SyntheticSpec spec;
  read_if(j, "n_tickers", spec.n_tickers);
  read_if(j, "n_days", spec.n_days);
  read_if(j, "seed", spec.seed);
  read_if(j, "phi1", spec.phi1);
  read_if(j, "phi2", spec.phi2);
  read_if(j, "sigma", spec.sigma);
  read_if(j, "init_price", spec.init_price);
  read_if(j, "base_volume", spec.base_volume);
  read_if(j, "volume_noise", spec.volume_noise);
  return spec;
}

TrainConfig parse_train_config(const json& j) {
  reject_unknown_keys(j,
                      {"epochs", "batch", "learning_rate", "optimizer", "seed", "init_scale",
                       "forget_bias_offset", "grad_clip_norm", "hidden_dim"},
                      "lstm");
  TrainConfig c;
  read_if(j, "epochs", c.epochs);
  read_if(j, "batch", c.batch);
  read_if(j, "learning_rate", c.learning_rate);
  read_if(j, "optimizer", c.optimizer);
  read_if(j, "seed", c.seed);
  read_if(j, "init_scale", c.init_scale);
  read_if(j, "forget_bias_offset", c.forget_bias_offset);
  read_if(j, "grad_clip_norm", c.grad_clip_norm);
  read_if(j, "hidden_dim", c.hidden_dim);
  return c;
}

FilterConfig parse_filter_config(const json& j) {
  reject_unknown_keys(j, {"no_trade_band", "shrink_constant"}, "filter");
  FilterConfig c;
  read_if(j, "no_trade_band", c.no_trade_band);
  read_if(j, "shrink_constant", c.shrink_constant);
  return c;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown_keys(j,
                      {"data_source", "train_size", "horizon", "window_len", "lstm", "filter",
                       "equity_initial", "commission_rate", "group_len", "output_dir", "seed",
                       "workers", "predictor"},
                      "top level");

  RunConfig config;
  if (!j.contains("data_source")) throw ConfigError("config: missing 'data_source'");
  {
    const json& ds = j.at("data_source");
    if (!ds.is_object()) throw ConfigError("config: data_source must be an object");
    reject_unknown_keys(ds, {"csv_dir", "synthetic"}, "data_source");
    const bool has_csv = ds.contains("csv_dir");
    const bool has_synth = ds.contains("synthetic");
    if (has_csv == has_synth) {
      throw ConfigError("config: data_source needs exactly one of 'csv_dir' or 'synthetic'");
    }
    if (has_csv) {
      config.data_source.csv_dir = std::filesystem::path(ds.at("csv_dir").get<std::string>());
    } else {
      config.data_source.synthetic = parse_synthetic_spec(ds.at("synthetic"));
    }
  }
  read_if(j, "train_size", config.train_size);
  read_if(j, "horizon", config.horizon);
  read_if(j, "window_len", config.window_len);
  if (j.contains("lstm")) config.lstm = parse_train_config(j.at("lstm"));
  if (j.contains("filter")) config.filter = parse_filter_config(j.at("filter"));
  read_if(j, "equity_initial", config.equity_initial);
  read_if(j, "commission_rate", config.commission_rate);
  read_if(j, "group_len", config.group_len);
  if (j.contains("output_dir")) {
    config.output_dir = std::filesystem::path(j.at("output_dir").get<std::string>());
  }
  read_if(j, "seed", config.seed);
  read_if(j, "workers", config.workers);
  read_if(j, "predictor", config.predictor);

  validate_run_config(config);
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

std::string run_config_to_json(const RunConfig& config) {
  json j;
  json ds;
  if (config.data_source.csv_dir) {
    ds["csv_dir"] = config.data_source.csv_dir->string();
  } else if (config.data_source.synthetic) {
    const SyntheticSpec& s = *config.data_source.synthetic;
    ds["synthetic"] = {{"n_tickers", s.n_tickers},
                       {"n_days", s.n_days},
                       {"seed", s.seed},
                       {"phi1", s.phi1},
                       {"phi2", s.phi2},
                       {"sigma", s.sigma},
                       {"init_price", s.init_price},
                       {"base_volume", s.base_volume},
                       {"volume_noise", s.volume_noise}};
  }
  j["data_source"] = std::move(ds);
  j["train_size"] = config.train_size;
  j["horizon"] = config.horizon;
  j["window_len"] = config.window_len;
  j["lstm"] = {{"epochs", config.lstm.epochs},
               {"batch", config.lstm.batch},
               {"learning_rate", config.lstm.learning_rate},
               {"optimizer", config.lstm.optimizer},
               {"seed", config.lstm.seed},
               {"init_scale", config.lstm.init_scale},
               {"forget_bias_offset", config.lstm.forget_bias_offset},
               {"grad_clip_norm", config.lstm.grad_clip_norm},
               {"hidden_dim", config.lstm.hidden_dim}};
  j["filter"] = {{"no_trade_band", config.filter.no_trade_band},
                 {"shrink_constant", config.filter.shrink_constant}};
  j["equity_initial"] = config.equity_initial;
  j["commission_rate"] = config.commission_rate;
  j["group_len"] = config.group_len;
  j["output_dir"] = config.output_dir.string();
  j["seed"] = config.seed;
  j["workers"] = config.workers;
  j["predictor"] = config.predictor;
  return j.dump(2);
}

void validate_run_config(const RunConfig& config) {
  const bool has_csv = config.data_source.csv_dir.has_value();
  const bool has_synth = config.data_source.synthetic.has_value();
  if (has_csv == has_synth) {
    throw ConfigError("config: data_source needs exactly one of 'csv_dir' or 'synthetic'");
  }
  if (has_synth) validate_spec(*config.data_source.synthetic);
  if (config.train_size < 1) throw ConfigError("config: train_size must be >= 1");
  if (config.horizon < 1) throw ConfigError("config: horizon must be >= 1");
  if (config.window_len < 1) throw ConfigError("config: window_len must be >= 1");
  validate_train_config(config.lstm);
  validate_filter(config.filter);
  if (!(config.equity_initial > 0.0)) throw ConfigError("config: equity_initial must be > 0");
  if (config.commission_rate < 0.0) throw ConfigError("config: commission_rate must be >= 0");
  if (config.group_len < 2) throw ConfigError("config: group_len must be >= 2");
  if (config.output_dir.empty()) throw ConfigError("config: output_dir must not be empty");
  if (config.workers < 0) throw ConfigError("config: workers must be >= 0");
  predictor_kind_from_string(config.predictor);  // validates the name
}

}  // namespace momo
