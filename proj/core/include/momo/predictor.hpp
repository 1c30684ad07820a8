#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "momo/dataset.hpp"

namespace momo {

/// All trainable weights of the single-layer LSTM regressor.
/// Matrices are row-major; w_* are hidden x input, u_* are hidden x hidden.
struct LstmParams {
  int input_dim = kFeatureCount;
  int hidden_dim = 32;

  std::vector<double> w_i, w_f, w_o, w_g;
  std::vector<double> u_i, u_f, u_o, u_g;
  std::vector<double> b_i, b_f, b_o, b_g;
  std::vector<double> w_out;
  double b_out = 0.0;

  static LstmParams zeros(int input_dim, int hidden_dim);

  /// Total number of trainable coordinates.
  std::size_t coordinate_count() const;
};

/// Gradients share the parameter layout.
using LstmGrads = LstmParams;

/// Spans over every trainable array in a fixed order (the order used by the
/// optimizer, the checkpoint format and the gradient oracle).
std::vector<std::pair<const char*, std::span<double>>> named_param_spans(LstmParams& p);
std::vector<std::pair<const char*, std::span<const double>>> named_param_spans(
    const LstmParams& p);

struct TrainConfig {
  int epochs = 200;
  int batch = 0;  // 0 = full batch
  double learning_rate = 1e-3;
  std::string optimizer = "adam";
  std::uint64_t seed = 1;
  double init_scale = 0.08;
  double forget_bias_offset = 1.0;
  double grad_clip_norm = 5.0;
  int hidden_dim = 32;
};

void validate_train_config(const TrainConfig& config);

/// Cached activations of one forward pass, consumed by backpropagation
/// through time. Flat layout: step * hidden_dim + unit.
struct LstmTrace {
  int steps = 0;
  int hidden_dim = 0;
  std::vector<double> gate_i, gate_f, gate_o, gate_g;
  std::vector<double> cell, cell_tanh, hidden;
};

/// Run the LSTM over `steps` rows of a row-major [steps x input_dim] window
/// with zero initial state; returns w_out . h_T + b_out. Fills `trace` when
/// given. Throws ConfigError on dimension mismatch.
double lstm_forward(const LstmParams& params, std::span<const double> window, int steps,
                    LstmTrace* trace = nullptr);

/// Mean of squared prediction errors. Throws on empty or mismatched input.
double mse_loss(std::span<const double> predictions, std::span<const double> labels);

/// Exact gradient of mse_loss over the batch with respect to every parameter,
/// via backpropagation through all window steps.
LstmGrads lstm_grad(const LstmParams& params, std::span<const Sample> batch);

/// Gradient plus the batch loss in one pass (training hot path).
double lstm_grad_and_loss(const LstmParams& params, std::span<const Sample> batch,
                          LstmGrads& grads);

enum class PredictorKind { lstm, persistence, zero };

const char* to_string(PredictorKind kind);
PredictorKind predictor_kind_from_string(const std::string& name);

struct PredictorHandle {
  PredictorKind kind = PredictorKind::lstm;
  LstmParams params;
  Scaler scaler;
};

struct TrainResult {
  PredictorHandle handle;
  /// losses[0] is the pre-training full-batch MSE, losses[e] the MSE after
  /// epoch e; size epochs + 1.
  std::vector<double> losses;
};

/// Deterministic gradient training on an already standardized dataset.
/// Same (dataset, config) always yields bit-identical parameters.
/// Throws DataError on an empty dataset and NumericError (naming the epoch)
/// if the loss stops being finite.
TrainResult train(const Dataset& dataset, const TrainConfig& config);

/// Scores per window. lstm runs the forward pass; persistence returns the
/// window's last-day ret_momentum cell mapped back to raw units through the
/// handle's scaler; zero returns 0. Windows must be standardized with the
/// same scaler used in training.
std::vector<double> predict(const PredictorHandle& handle, std::span<const Sample> windows);

}  // namespace momo
