#include "momo/predictor.hpp"

#include <cmath>

#include "momo/errors.hpp"
#include "momo/rng.hpp"

namespace momo {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_dims(const LstmParams& p) {
  const auto h = static_cast<std::size_t>(p.hidden_dim);
  const auto in = static_cast<std::size_t>(p.input_dim);
  if (p.hidden_dim < 1 || p.input_dim < 1) throw ConfigError("lstm: dimensions must be >= 1");
  const bool ok = p.w_i.size() == h * in && p.w_f.size() == h * in && p.w_o.size() == h * in &&
                  p.w_g.size() == h * in && p.u_i.size() == h * h && p.u_f.size() == h * h &&
                  p.u_o.size() == h * h && p.u_g.size() == h * h && p.b_i.size() == h &&
                  p.b_f.size() == h && p.b_o.size() == h && p.b_g.size() == h &&
                  p.w_out.size() == h;
  if (!ok) throw ConfigError("lstm: parameter shapes inconsistent with dimensions");
}

// y[r] += M[r,:] . v  for a row-major h x n matrix.
void add_matvec(std::span<const double> m, std::span<const double> v, std::span<double> y) {
  const std::size_t h = y.size();
  const std::size_t n = v.size();
  for (std::size_t r = 0; r < h; ++r) {
    const double* row = m.data() + r * n;
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) acc += row[c] * v[c];
    y[r] += acc;
  }
}

// M[r,:] += a[r] * v  (outer-product accumulation).
void add_outer(std::span<double> m, std::span<const double> a, std::span<const double> v) {
  const std::size_t h = a.size();
  const std::size_t n = v.size();
  for (std::size_t r = 0; r < h; ++r) {
    double* row = m.data() + r * n;
    const double ar = a[r];
    for (std::size_t c = 0; c < n; ++c) row[c] += ar * v[c];
  }
}

// y[c] += M[:,c] . a  for a row-major h x n matrix (transposed product).
void add_matvec_t(std::span<const double> m, std::span<const double> a, std::span<double> y) {
  const std::size_t h = a.size();
  const std::size_t n = y.size();
  for (std::size_t r = 0; r < h; ++r) {
    const double* row = m.data() + r * n;
    const double ar = a[r];
    for (std::size_t c = 0; c < n; ++c) y[c] += ar * row[c];
  }
}

struct BpttWorkspace {
  std::vector<double> dh, dc, dh_prev, dc_prev;
  std::vector<double> da_i, da_f, da_o, da_g;

  void resize(std::size_t h) {
    dh.assign(h, 0.0);
    dc.assign(h, 0.0);
    dh_prev.assign(h, 0.0);
    dc_prev.assign(h, 0.0);
    da_i.assign(h, 0.0);
    da_f.assign(h, 0.0);
    da_o.assign(h, 0.0);
    da_g.assign(h, 0.0);
  }
};

// Backpropagate one sample's squared-error gradient scaled by `d_pred`.
void backprop_sample(const LstmParams& p, std::span<const double> window, const LstmTrace& trace,
                     double d_pred, LstmGrads& g, BpttWorkspace& ws) {
  const auto h = static_cast<std::size_t>(p.hidden_dim);
  const auto in = static_cast<std::size_t>(p.input_dim);
  const int steps = trace.steps;

  ws.resize(h);
  const std::size_t last = static_cast<std::size_t>(steps - 1) * h;
  for (std::size_t r = 0; r < h; ++r) {
    g.w_out[r] += d_pred * trace.hidden[last + r];
    ws.dh[r] = d_pred * p.w_out[r];
  }
  g.b_out += d_pred;

  for (int t = steps - 1; t >= 0; --t) {
    const std::size_t off = static_cast<std::size_t>(t) * h;
    const std::span<const double> x = window.subspan(static_cast<std::size_t>(t) * in, in);
    for (std::size_t r = 0; r < h; ++r) {
      const double i_t = trace.gate_i[off + r];
      const double f_t = trace.gate_f[off + r];
      const double o_t = trace.gate_o[off + r];
      const double g_t = trace.gate_g[off + r];
      const double tc = trace.cell_tanh[off + r];
      const double c_prev = t > 0 ? trace.cell[off - h + r] : 0.0;

      const double do_ = ws.dh[r] * tc;
      const double dc = ws.dc[r] + ws.dh[r] * o_t * (1.0 - tc * tc);
      const double di = dc * g_t;
      const double df = dc * c_prev;
      const double dg = dc * i_t;
      ws.dc_prev[r] = dc * f_t;

      ws.da_i[r] = di * i_t * (1.0 - i_t);
      ws.da_f[r] = df * f_t * (1.0 - f_t);
      ws.da_o[r] = do_ * o_t * (1.0 - o_t);
      ws.da_g[r] = dg * (1.0 - g_t * g_t);

      g.b_i[r] += ws.da_i[r];
      g.b_f[r] += ws.da_f[r];
      g.b_o[r] += ws.da_o[r];
      g.b_g[r] += ws.da_g[r];
    }

    add_outer(g.w_i, ws.da_i, x);
    add_outer(g.w_f, ws.da_f, x);
    add_outer(g.w_o, ws.da_o, x);
    add_outer(g.w_g, ws.da_g, x);

    std::fill(ws.dh_prev.begin(), ws.dh_prev.end(), 0.0);
    if (t > 0) {
      const std::span<const double> h_prev(trace.hidden.data() + off - h, h);
      add_outer(g.u_i, ws.da_i, h_prev);
      add_outer(g.u_f, ws.da_f, h_prev);
      add_outer(g.u_o, ws.da_o, h_prev);
      add_outer(g.u_g, ws.da_g, h_prev);
      add_matvec_t(p.u_i, ws.da_i, ws.dh_prev);
      add_matvec_t(p.u_f, ws.da_f, ws.dh_prev);
      add_matvec_t(p.u_o, ws.da_o, ws.dh_prev);
      add_matvec_t(p.u_g, ws.da_g, ws.dh_prev);
    }
    std::swap(ws.dh, ws.dh_prev);
    std::swap(ws.dc, ws.dc_prev);
  }
}

}  // namespace

LstmParams LstmParams::zeros(int input_dim, int hidden_dim) {
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  const auto h = static_cast<std::size_t>(hidden_dim);
  const auto in = static_cast<std::size_t>(input_dim);
  p.w_i.assign(h * in, 0.0);
  p.w_f.assign(h * in, 0.0);
  p.w_o.assign(h * in, 0.0);
  p.w_g.assign(h * in, 0.0);
  p.u_i.assign(h * h, 0.0);
  p.u_f.assign(h * h, 0.0);
  p.u_o.assign(h * h, 0.0);
  p.u_g.assign(h * h, 0.0);
  p.b_i.assign(h, 0.0);
  p.b_f.assign(h, 0.0);
  p.b_o.assign(h, 0.0);
  p.b_g.assign(h, 0.0);
  p.w_out.assign(h, 0.0);
  p.b_out = 0.0;
  return p;
}

std::size_t LstmParams::coordinate_count() const {
  const auto h = static_cast<std::size_t>(hidden_dim);
  const auto in = static_cast<std::size_t>(input_dim);
  return 4 * (h * in + h * h + h) + h + 1;
}

std::vector<std::pair<const char*, std::span<double>>> named_param_spans(LstmParams& p) {
  return {
      {"w_i", p.w_i}, {"w_f", p.w_f}, {"w_o", p.w_o}, {"w_g", p.w_g},
      {"u_i", p.u_i}, {"u_f", p.u_f}, {"u_o", p.u_o}, {"u_g", p.u_g},
      {"b_i", p.b_i}, {"b_f", p.b_f}, {"b_o", p.b_o}, {"b_g", p.b_g},
      {"w_out", p.w_out}, {"b_out", std::span<double>(&p.b_out, 1)},
  };
}

std::vector<std::pair<const char*, std::span<const double>>> named_param_spans(
    const LstmParams& p) {
  return {
      {"w_i", p.w_i}, {"w_f", p.w_f}, {"w_o", p.w_o}, {"w_g", p.w_g},
      {"u_i", p.u_i}, {"u_f", p.u_f}, {"u_o", p.u_o}, {"u_g", p.u_g},
      {"b_i", p.b_i}, {"b_f", p.b_f}, {"b_o", p.b_o}, {"b_g", p.b_g},
      {"w_out", p.w_out}, {"b_out", std::span<const double>(&p.b_out, 1)},
  };
}

void validate_train_config(const TrainConfig& config) {
  if (config.epochs < 1) throw ConfigError("train config: epochs must be >= 1");
  if (!(config.learning_rate > 0.0)) throw ConfigError("train config: learning_rate must be > 0");
  if (config.batch < 0) throw ConfigError("train config: batch must be >= 0");
  if (config.optimizer != "adam") {
    throw ConfigError("train config: unsupported optimizer '" + config.optimizer + "'");
  }
  if (!(config.init_scale >= 0.0)) throw ConfigError("train config: init_scale must be >= 0");
  if (!(config.grad_clip_norm > 0.0)) {
    throw ConfigError("train config: grad_clip_norm must be > 0");
  }
  if (config.hidden_dim < 1) throw ConfigError("train config: hidden_dim must be >= 1");
}

double lstm_forward(const LstmParams& params, std::span<const double> window, int steps,
                    LstmTrace* trace) {
  check_dims(params);
  const auto h = static_cast<std::size_t>(params.hidden_dim);
  const auto in = static_cast<std::size_t>(params.input_dim);
  if (steps < 1) throw ConfigError("lstm_forward: steps must be >= 1");
  if (window.size() != static_cast<std::size_t>(steps) * in) {
    throw ConfigError("lstm_forward: window size " + std::to_string(window.size()) +
                      " does not match steps x input_dim");
  }

  if (trace) {
    trace->steps = steps;
    trace->hidden_dim = params.hidden_dim;
    const std::size_t total = static_cast<std::size_t>(steps) * h;
    trace->gate_i.assign(total, 0.0);
    trace->gate_f.assign(total, 0.0);
    trace->gate_o.assign(total, 0.0);
    trace->gate_g.assign(total, 0.0);
    trace->cell.assign(total, 0.0);
    trace->cell_tanh.assign(total, 0.0);
    trace->hidden.assign(total, 0.0);
  }

  std::vector<double> hidden(h, 0.0);
  std::vector<double> cell(h, 0.0);
  std::vector<double> a_i(h), a_f(h), a_o(h), a_g(h);

  for (int t = 0; t < steps; ++t) {
    const std::span<const double> x = window.subspan(static_cast<std::size_t>(t) * in, in);
    std::copy(params.b_i.begin(), params.b_i.end(), a_i.begin());
    std::copy(params.b_f.begin(), params.b_f.end(), a_f.begin());
    std::copy(params.b_o.begin(), params.b_o.end(), a_o.begin());
    std::copy(params.b_g.begin(), params.b_g.end(), a_g.begin());
    add_matvec(params.w_i, x, a_i);
    add_matvec(params.w_f, x, a_f);
    add_matvec(params.w_o, x, a_o);
    add_matvec(params.w_g, x, a_g);
    add_matvec(params.u_i, hidden, a_i);
    add_matvec(params.u_f, hidden, a_f);
    add_matvec(params.u_o, hidden, a_o);
    add_matvec(params.u_g, hidden, a_g);

    const std::size_t off = static_cast<std::size_t>(t) * h;
    for (std::size_t r = 0; r < h; ++r) {
      const double i_t = sigmoid(a_i[r]);
      const double f_t = sigmoid(a_f[r]);
      const double o_t = sigmoid(a_o[r]);
      const double g_t = std::tanh(a_g[r]);
      const double c_t = f_t * cell[r] + i_t * g_t;
      const double tc = std::tanh(c_t);
      cell[r] = c_t;
      hidden[r] = o_t * tc;
      if (trace) {
        trace->gate_i[off + r] = i_t;
        trace->gate_f[off + r] = f_t;
        trace->gate_o[off + r] = o_t;
        trace->gate_g[off + r] = g_t;
        trace->cell[off + r] = c_t;
        trace->cell_tanh[off + r] = tc;
        trace->hidden[off + r] = hidden[r];
      }
    }
  }

  double out = params.b_out;
  for (std::size_t r = 0; r < h; ++r) out += params.w_out[r] * hidden[r];
  return out;
}

double mse_loss(std::span<const double> predictions, std::span<const double> labels) {
  if (predictions.empty()) throw DataError("mse_loss: empty input");
  if (predictions.size() != labels.size()) {
    throw DataError("mse_loss: length mismatch (" + std::to_string(predictions.size()) + " vs " +
                    std::to_string(labels.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - labels[i];
    sum += e * e;
  }
  return sum / static_cast<double>(predictions.size());
}

double lstm_grad_and_loss(const LstmParams& params, std::span<const Sample> batch,
                          LstmGrads& grads) {
  if (batch.empty()) throw DataError("lstm_grad: empty batch");
  check_dims(params);
  grads = LstmParams::zeros(params.input_dim, params.hidden_dim);

  LstmTrace trace;
  BpttWorkspace ws;
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const Sample& sample : batch) {
    const double pred = lstm_forward(params, sample.window, sample.window_len, &trace);
    const double err = pred - sample.label;
    loss += err * err;
    backprop_sample(params, sample.window, trace, 2.0 * err * inv_n, grads, ws);
  }
  return loss * inv_n;
}

LstmGrads lstm_grad(const LstmParams& params, std::span<const Sample> batch) {
  LstmGrads grads;
  lstm_grad_and_loss(params, batch, grads);
  return grads;
}

const char* to_string(PredictorKind kind) {
  switch (kind) {
    case PredictorKind::lstm: return "lstm";
    case PredictorKind::persistence: return "persistence";
    case PredictorKind::zero: return "zero";
  }
  return "lstm";
}

PredictorKind predictor_kind_from_string(const std::string& name) {
  if (name == "lstm") return PredictorKind::lstm;
  if (name == "persistence") return PredictorKind::persistence;
  if (name == "zero") return PredictorKind::zero;
  throw ConfigError("unknown predictor kind '" + name + "'");
}

TrainResult train(const Dataset& dataset, const TrainConfig& config) {
  validate_train_config(config);
  if (dataset.samples.empty()) throw DataError("train: empty dataset");
  const int input_dim = kFeatureCount;
  const std::size_t n = dataset.samples.size();

  TrainResult result;
  result.handle.kind = PredictorKind::lstm;
  result.handle.scaler = dataset.scaler;
  LstmParams& params = result.handle.params;
  params = LstmParams::zeros(input_dim, config.hidden_dim);

  SplitMix64 stream(config.seed);
  for (auto& [name, span] : named_param_spans(params)) {
    for (double& v : span) v = stream.next_uniform(-config.init_scale, config.init_scale);
  }
  for (double& v : params.b_f) v += config.forget_bias_offset;

  // Adam state, laid out in the named-span order.
  std::vector<double> m(params.coordinate_count(), 0.0);
  std::vector<double> v(params.coordinate_count(), 0.0);
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEpsilon = 1e-8;
  long step = 0;

  const std::size_t batch_size = config.batch == 0
                                     ? n
                                     : std::min(static_cast<std::size_t>(config.batch), n);
  const bool full_batch = batch_size == n;

  LstmGrads grads;
  auto apply_update = [&](const LstmGrads& g_in) {
    // Global-norm clipping, then one Adam step.
    double norm_sq = 0.0;
    for (const auto& [name, span] : named_param_spans(g_in)) {
      for (double gv : span) norm_sq += gv * gv;
    }
    const double norm = std::sqrt(norm_sq);
    const double scale = norm > config.grad_clip_norm ? config.grad_clip_norm / norm : 1.0;

    ++step;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
    std::size_t k = 0;
    auto param_spans = named_param_spans(params);
    auto grad_spans = named_param_spans(g_in);
    for (std::size_t s = 0; s < param_spans.size(); ++s) {
      std::span<double> pv = param_spans[s].second;
      std::span<const double> gv = grad_spans[s].second;
      for (std::size_t j = 0; j < pv.size(); ++j, ++k) {
        const double g = gv[j] * scale;
        m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * g;
        v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * g * g;
        const double m_hat = m[k] / bc1;
        const double v_hat = v[k] / bc2;
        pv[j] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + kEpsilon);
      }
    }
  };

  auto full_loss = [&]() {
    double sum = 0.0;
    for (const Sample& s : dataset.samples) {
      const double e = lstm_forward(params, s.window, s.window_len) - s.label;
      sum += e * e;
    }
    return sum / static_cast<double>(n);
  };

  result.losses.reserve(static_cast<std::size_t>(config.epochs) + 1);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_loss;
    if (full_batch) {
      epoch_loss = lstm_grad_and_loss(params, dataset.samples, grads);
      result.losses.push_back(epoch_loss);
      apply_update(grads);
    } else {
      epoch_loss = full_loss();
      result.losses.push_back(epoch_loss);
      for (std::size_t start = 0; start < n; start += batch_size) {
        const std::size_t len = std::min(batch_size, n - start);
        lstm_grad_and_loss(params, std::span<const Sample>(dataset.samples).subspan(start, len),
                           grads);
        apply_update(grads);
      }
    }
    if (!std::isfinite(epoch_loss)) {
      throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch));
    }
  }
  const double final_loss = full_loss();
  if (!std::isfinite(final_loss)) {
    throw NumericError("train: non-finite loss at epoch " + std::to_string(config.epochs));
  }
  result.losses.push_back(final_loss);
  return result;
}

std::vector<double> predict(const PredictorHandle& handle, std::span<const Sample> windows) {
  std::vector<double> out;
  out.reserve(windows.size());
  switch (handle.kind) {
    case PredictorKind::lstm:
      for (const Sample& s : windows) {
        out.push_back(lstm_forward(handle.params, s.window, s.window_len));
      }
      break;
    case PredictorKind::persistence:
      for (const Sample& s : windows) {
        out.push_back(unscale_cell(s.cell(s.window_len - 1, 1), handle.scaler, 1));
      }
      break;
    case PredictorKind::zero:
      out.assign(windows.size(), 0.0);
      break;
  }
  return out;
}

}  // namespace momo
