#include "frele/models.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "json.hpp"

#include "frele/rng.hpp"

namespace frele {

namespace {

using nlohmann::json;

void fill_uniform(Rng& rng, double bound, double* data, long count) {
  for (long i = 0; i < count; ++i) data[i] = rng.uniform(-bound, bound);
}

/** Appends a column-major copy of m to out at offset, advancing it. */
void pack(const Eigen::MatrixXd& m, Eigen::VectorXd& out, long& offset) {
  out.segment(offset, m.size()) =
      Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
  offset += m.size();
}

void unpack(const Eigen::VectorXd& in, Eigen::MatrixXd& m, long& offset) {
  Eigen::Map<Eigen::VectorXd>(m.data(), m.size()) =
      in.segment(offset, m.size());
  offset += m.size();
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::vector<double>(m.data(), m.data() + m.size());
  return j;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  Eigen::MatrixXd m(j.at("rows").get<long>(), j.at("cols").get<long>());
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<long>(data.size()) != m.size())
    throw ParseError("checkpoint matrix data length does not match its shape");
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

json read_checkpoint(const std::string& path, const char* expected_model) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open checkpoint " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("checkpoint " + path + ": " + e.what());
  }
  if (j.value("format_version", 0) != 1)
    throw ParseError("checkpoint " + path + ": unsupported format_version");
  if (j.value("model", "") != expected_model)
    throw ParseError("checkpoint " + path + ": expected a " +
                     std::string(expected_model) + " model");
  return j;
}

void write_checkpoint(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("write failed for checkpoint " + path);
}

}  // namespace

std::pair<double, double> activation(const ActivationKind& act, double x) {
  switch (act.kind) {
    case Activation::relu:
      return {x > 0.0 ? x : 0.0, x > 0.0 ? 1.0 : 0.0};
    case Activation::tanh: {
      const double t = std::tanh(x);
      return {t, 1.0 - t * t};
    }
    case Activation::ricker: {
      const double a = act.a;
      if (!(a > 0.0))
        throw InvalidInput("ricker activation needs a positive width a");
      const double k = std::pow(std::numbers::pi, 0.25) / (15.0 * a);
      const double u = x / a;
      const double envelope = std::exp(-0.5 * u * u);
      return {k * (1.0 - u * u) * envelope,
              k * envelope * (u * u * u - 3.0 * u) / a};
    }
  }
  throw InvalidInput("unknown activation kind");
}

MLPRegressor MLPRegressor::init(int in_dim, int hidden, int out_dim,
                                const ActivationKind& act, std::uint64_t seed) {
  if (in_dim < 1 || hidden < 1 || out_dim < 1)
    throw InvalidInput("MLP dimensions must be positive");
  if (act.kind == Activation::ricker && !(act.a > 0.0))
    throw InvalidInput("ricker activation needs a positive width a");
  MLPRegressor m;
  m.act = act;
  m.w1.resize(hidden, in_dim);
  m.b1.resize(hidden);
  m.w2.resize(out_dim, hidden);
  m.b2.resize(out_dim);
  Rng rng(seed);
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(in_dim));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  fill_uniform(rng, bound1, m.w1.data(), m.w1.size());
  fill_uniform(rng, bound1, m.b1.data(), m.b1.size());
  fill_uniform(rng, bound2, m.w2.data(), m.w2.size());
  fill_uniform(rng, bound2, m.b2.data(), m.b2.size());
  return m;
}

Eigen::VectorXd MLPRegressor::apply(const Eigen::VectorXd& x) const {
  return apply_batch(x);
}

Eigen::MatrixXd MLPRegressor::apply_batch(const Eigen::MatrixXd& inputs) const {
  if (inputs.rows() != w1.cols())
    throw ShapeMismatch("MLP expects " + std::to_string(w1.cols()) +
                        " input rows, got " + std::to_string(inputs.rows()));
  Eigen::MatrixXd hidden = (w1 * inputs).colwise() + b1;
  for (long i = 0; i < hidden.size(); ++i)
    hidden.data()[i] = activation(act, hidden.data()[i]).first;
  return (w2 * hidden).colwise() + b2;
}

Eigen::VectorXd MLPRegressor::backprop_batch(
    const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& upstream) const {
  if (inputs.rows() != w1.cols())
    throw ShapeMismatch("MLP expects " + std::to_string(w1.cols()) +
                        " input rows, got " + std::to_string(inputs.rows()));
  if (upstream.rows() != w2.rows() || upstream.cols() != inputs.cols())
    throw ShapeMismatch("MLP upstream gradient shape mismatch");
  const Eigen::MatrixXd pre = (w1 * inputs).colwise() + b1;
  Eigen::MatrixXd value(pre.rows(), pre.cols());
  Eigen::MatrixXd slope(pre.rows(), pre.cols());
  for (long i = 0; i < pre.size(); ++i) {
    const auto [v, s] = activation(act, pre.data()[i]);
    value.data()[i] = v;
    slope.data()[i] = s;
  }
  const Eigen::MatrixXd d_w2 = upstream * value.transpose();
  const Eigen::VectorXd d_b2 = upstream.rowwise().sum();
  const Eigen::MatrixXd d_pre =
      (w2.transpose() * upstream).cwiseProduct(slope);
  const Eigen::MatrixXd d_w1 = d_pre * inputs.transpose();
  const Eigen::VectorXd d_b1 = d_pre.rowwise().sum();

  Eigen::VectorXd grads(param_count());
  long offset = 0;
  pack(d_w1, grads, offset);
  pack(d_b1, grads, offset);
  pack(d_w2, grads, offset);
  pack(d_b2, grads, offset);
  return grads;
}

long MLPRegressor::param_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size();
}

Eigen::VectorXd MLPRegressor::get_params() const {
  Eigen::VectorXd params(param_count());
  long offset = 0;
  pack(w1, params, offset);
  pack(b1, params, offset);
  pack(w2, params, offset);
  pack(b2, params, offset);
  return params;
}

void MLPRegressor::set_params(const Eigen::VectorXd& params) {
  if (params.size() != param_count())
    throw ShapeMismatch("MLP set_params: expected " +
                        std::to_string(param_count()) + " values, got " +
                        std::to_string(params.size()));
  long offset = 0;
  unpack(params, w1, offset);
  Eigen::MatrixXd b1m = b1;
  unpack(params, b1m, offset);
  b1 = b1m;
  unpack(params, w2, offset);
  Eigen::MatrixXd b2m = b2;
  unpack(params, b2m, offset);
  b2 = b2m;
}

Eigen::MatrixXd moving_average_trend(const Eigen::MatrixXd& input,
                                     int kernel) {
  if (kernel < 3 || kernel % 2 == 0)
    throw InvalidInput("moving average kernel must be odd and >= 3");
  const long steps = input.rows();
  const long channels = input.cols();
  const int pad = (kernel - 1) / 2;
  Eigen::MatrixXd trend(steps, channels);
  for (long c = 0; c < channels; ++c) {
    for (long t = 0; t < steps; ++t) {
      double sum = 0.0;
      for (int j = -pad; j <= pad; ++j) {
        const long idx = std::clamp(t + j, 0L, steps - 1);
        sum += input(idx, c);
      }
      trend(t, c) = sum / kernel;
    }
  }
  return trend;
}

LinearForecaster LinearForecaster::init(LinearMode mode, int lookback,
                                        int horizon, std::uint64_t seed,
                                        bool channel_shared, int channels,
                                        int ma_kernel) {
  if (lookback < 1 || horizon < 1)
    throw InvalidInput("lookback and horizon must be positive");
  if (!channel_shared && channels < 1)
    throw InvalidInput("per-channel weights need a positive channel count");
  LinearForecaster m;
  m.mode = mode;
  m.lookback = lookback;
  m.horizon = horizon;
  m.ma_kernel = ma_kernel;
  m.channel_shared = channel_shared;
  const int sets = channel_shared ? 1 : channels;
  Rng rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(lookback));
  if (mode == LinearMode::plain) {
    m.weights.resize(sets);
    for (auto& w : m.weights) {
      w.resize(horizon, lookback);
      fill_uniform(rng, bound, w.data(), w.size());
    }
  } else {
    m.trend_weights.resize(sets);
    m.seasonal_weights.resize(sets);
    for (int s = 0; s < sets; ++s) {
      m.trend_weights[s].resize(horizon, lookback);
      fill_uniform(rng, bound, m.trend_weights[s].data(),
                   m.trend_weights[s].size());
      m.seasonal_weights[s].resize(horizon, lookback);
      fill_uniform(rng, bound, m.seasonal_weights[s].data(),
                   m.seasonal_weights[s].size());
    }
  }
  m.bias.resize(horizon);
  fill_uniform(rng, bound, m.bias.data(), m.bias.size());
  m.validate();
  return m;
}

void LinearForecaster::validate() const {
  if (mode == LinearMode::decomposed && (ma_kernel < 3 || ma_kernel % 2 == 0))
    throw InvalidInput("decomposed mode needs an odd moving-average kernel >= 3");
  const auto finite = [](const Eigen::MatrixXd& m) {
    return m.allFinite();
  };
  bool ok = bias.allFinite();
  for (const auto& w : weights) ok = ok && finite(w);
  for (const auto& w : trend_weights) ok = ok && finite(w);
  for (const auto& w : seasonal_weights) ok = ok && finite(w);
  if (!ok) throw InvalidInput("forecaster parameters must be finite");
}

Eigen::MatrixXd LinearForecaster::apply(const Eigen::MatrixXd& input) const {
  if (input.rows() != lookback)
    throw ShapeMismatch("forecaster expects " + std::to_string(lookback) +
                        " input rows, got " + std::to_string(input.rows()));
  const long channels = input.cols();
  const long sets =
      static_cast<long>(mode == LinearMode::plain ? weights.size()
                                                  : trend_weights.size());
  if (!channel_shared && channels != sets)
    throw ShapeMismatch("forecaster has weights for " + std::to_string(sets) +
                        " channels, input has " + std::to_string(channels));
  Eigen::MatrixXd out(horizon, channels);
  if (mode == LinearMode::plain) {
    for (long c = 0; c < channels; ++c)
      out.col(c) = weights[channel_shared ? 0 : c] * input.col(c) + bias;
  } else {
    const Eigen::MatrixXd trend = moving_average_trend(input, ma_kernel);
    const Eigen::MatrixXd seasonal = input - trend;
    for (long c = 0; c < channels; ++c) {
      const long s = channel_shared ? 0 : c;
      out.col(c) = trend_weights[s] * trend.col(c) +
                   seasonal_weights[s] * seasonal.col(c) + bias;
    }
  }
  return out;
}

Eigen::VectorXd LinearForecaster::backprop(
    const Eigen::MatrixXd& input, const Eigen::MatrixXd& upstream) const {
  if (input.rows() != lookback || upstream.rows() != horizon ||
      upstream.cols() != input.cols())
    throw ShapeMismatch("forecaster backprop shape mismatch");
  const long channels = input.cols();
  Eigen::VectorXd grads = Eigen::VectorXd::Zero(param_count());
  long offset = 0;
  if (mode == LinearMode::plain) {
    for (std::size_t s = 0; s < weights.size(); ++s) {
      Eigen::MatrixXd d_w = Eigen::MatrixXd::Zero(horizon, lookback);
      if (channel_shared) {
        for (long c = 0; c < channels; ++c)
          d_w += upstream.col(c) * input.col(c).transpose();
      } else {
        d_w = upstream.col(static_cast<long>(s)) *
              input.col(static_cast<long>(s)).transpose();
      }
      pack(d_w, grads, offset);
    }
  } else {
    const Eigen::MatrixXd trend = moving_average_trend(input, ma_kernel);
    const Eigen::MatrixXd seasonal = input - trend;
    for (std::size_t s = 0; s < trend_weights.size(); ++s) {
      Eigen::MatrixXd d_trend = Eigen::MatrixXd::Zero(horizon, lookback);
      Eigen::MatrixXd d_seasonal = Eigen::MatrixXd::Zero(horizon, lookback);
      if (channel_shared) {
        for (long c = 0; c < channels; ++c) {
          d_trend += upstream.col(c) * trend.col(c).transpose();
          d_seasonal += upstream.col(c) * seasonal.col(c).transpose();
        }
      } else {
        const auto c = static_cast<long>(s);
        d_trend = upstream.col(c) * trend.col(c).transpose();
        d_seasonal = upstream.col(c) * seasonal.col(c).transpose();
      }
      pack(d_trend, grads, offset);
      pack(d_seasonal, grads, offset);
    }
  }
  const Eigen::VectorXd d_bias = upstream.rowwise().sum();
  grads.segment(offset, d_bias.size()) = d_bias;
  return grads;
}

long LinearForecaster::param_count() const {
  long count = bias.size();
  for (const auto& w : weights) count += w.size();
  for (const auto& w : trend_weights) count += w.size();
  for (const auto& w : seasonal_weights) count += w.size();
  return count;
}

Eigen::VectorXd LinearForecaster::get_params() const {
  Eigen::VectorXd params(param_count());
  long offset = 0;
  if (mode == LinearMode::plain) {
    for (const auto& w : weights) pack(w, params, offset);
  } else {
    for (std::size_t s = 0; s < trend_weights.size(); ++s) {
      pack(trend_weights[s], params, offset);
      pack(seasonal_weights[s], params, offset);
    }
  }
  params.segment(offset, bias.size()) = bias;
  return params;
}

void LinearForecaster::set_params(const Eigen::VectorXd& params) {
  if (params.size() != param_count())
    throw ShapeMismatch("forecaster set_params: expected " +
                        std::to_string(param_count()) + " values, got " +
                        std::to_string(params.size()));
  long offset = 0;
  if (mode == LinearMode::plain) {
    for (auto& w : weights) unpack(params, w, offset);
  } else {
    for (std::size_t s = 0; s < trend_weights.size(); ++s) {
      unpack(params, trend_weights[s], offset);
      unpack(params, seasonal_weights[s], offset);
    }
  }
  bias = params.segment(offset, bias.size());
}

void save_checkpoint(const std::string& path, const LinearForecaster& model) {
  json j;
  j["format_version"] = 1;
  j["model"] = "linear";
  j["mode"] = model.mode == LinearMode::plain ? "plain" : "decomposed";
  j["lookback"] = model.lookback;
  j["horizon"] = model.horizon;
  j["ma_kernel"] = model.ma_kernel;
  j["channel_shared"] = model.channel_shared;
  j["weights"] = json::array();
  for (const auto& w : model.weights) j["weights"].push_back(matrix_to_json(w));
  j["trend_weights"] = json::array();
  for (const auto& w : model.trend_weights)
    j["trend_weights"].push_back(matrix_to_json(w));
  j["seasonal_weights"] = json::array();
  for (const auto& w : model.seasonal_weights)
    j["seasonal_weights"].push_back(matrix_to_json(w));
  j["bias"] = std::vector<double>(model.bias.data(),
                                  model.bias.data() + model.bias.size());
  write_checkpoint(path, j);
}

void save_checkpoint(const std::string& path, const MLPRegressor& model) {
  json j;
  j["format_version"] = 1;
  j["model"] = "mlp";
  switch (model.act.kind) {
    case Activation::relu: j["activation"] = "relu"; break;
    case Activation::tanh: j["activation"] = "tanh"; break;
    case Activation::ricker: j["activation"] = "ricker"; break;
  }
  j["activation_a"] = model.act.a;
  j["w1"] = matrix_to_json(model.w1);
  j["b1"] = std::vector<double>(model.b1.data(),
                                model.b1.data() + model.b1.size());
  j["w2"] = matrix_to_json(model.w2);
  j["b2"] = std::vector<double>(model.b2.data(),
                                model.b2.data() + model.b2.size());
  write_checkpoint(path, j);
}

LinearForecaster load_linear_checkpoint(const std::string& path) {
  const json j = read_checkpoint(path, "linear");
  LinearForecaster m;
  try {
    m.mode = j.at("mode").get<std::string>() == "plain"
                 ? LinearMode::plain
                 : LinearMode::decomposed;
    m.lookback = j.at("lookback").get<int>();
    m.horizon = j.at("horizon").get<int>();
    m.ma_kernel = j.at("ma_kernel").get<int>();
    m.channel_shared = j.at("channel_shared").get<bool>();
    for (const auto& w : j.at("weights")) m.weights.push_back(matrix_from_json(w));
    for (const auto& w : j.at("trend_weights"))
      m.trend_weights.push_back(matrix_from_json(w));
    for (const auto& w : j.at("seasonal_weights"))
      m.seasonal_weights.push_back(matrix_from_json(w));
    const auto bias = j.at("bias").get<std::vector<double>>();
    m.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(),
                                               static_cast<long>(bias.size()));
  } catch (const json::exception& e) {
    throw ParseError("checkpoint " + path + ": " + e.what());
  }
  m.validate();
  return m;
}

MLPRegressor load_mlp_checkpoint(const std::string& path) {
  const json j = read_checkpoint(path, "mlp");
  MLPRegressor m;
  try {
    const auto name = j.at("activation").get<std::string>();
    if (name == "relu")
      m.act.kind = Activation::relu;
    else if (name == "tanh")
      m.act.kind = Activation::tanh;
    else if (name == "ricker")
      m.act.kind = Activation::ricker;
    else
      throw ParseError("checkpoint " + path + ": unknown activation " + name);
    m.act.a = j.at("activation_a").get<double>();
    m.w1 = matrix_from_json(j.at("w1"));
    const auto b1 = j.at("b1").get<std::vector<double>>();
    m.b1 = Eigen::Map<const Eigen::VectorXd>(b1.data(),
                                             static_cast<long>(b1.size()));
    m.w2 = matrix_from_json(j.at("w2"));
    const auto b2 = j.at("b2").get<std::vector<double>>();
    m.b2 = Eigen::Map<const Eigen::VectorXd>(b2.data(),
                                             static_cast<long>(b2.size()));
  } catch (const json::exception& e) {
    throw ParseError("checkpoint " + path + ": " + e.what());
  }
  return m;
}

}  // namespace frele
