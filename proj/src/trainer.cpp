#include "frele/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "frele/rng.hpp"

namespace frele {

AdamState AdamState::init(long size, double lr) {
  AdamState state;
  state.m = Eigen::VectorXd::Zero(size);
  state.v = Eigen::VectorXd::Zero(size);
  state.lr = lr;
  return state;
}

void adam_step(AdamState& state, Eigen::VectorXd& params,
               const Eigen::VectorXd& grads) {
  if (state.m.size() != params.size() || grads.size() != params.size())
    throw ShapeMismatch("adam_step: state, params and grads must match");
  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v +
            (1.0 - state.beta2) * grads.cwiseProduct(grads);
  const double m_corr =
      1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double v_corr =
      1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params -= (state.lr / m_corr) * state.m.cwiseQuotient(
                ((state.v / v_corr).cwiseSqrt().array() + state.eps).matrix());
}

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidInput("epochs must be at least 1");
  if (batch_size < 1) throw InvalidInput("batch_size must be at least 1");
  if (!(lr > 0.0) && lr != 0.0) throw InvalidInput("lr must be non-negative");
  if (patience < 1) throw InvalidInput("patience must be at least 1");
}

namespace {

LossBreakdown accumulate(LossBreakdown total, const LossBreakdown& part,
                         double weight) {
  total.time_loss += weight * part.time_loss;
  total.freq_loss += weight * part.freq_loss;
  total.combined += weight * part.combined;
  return total;
}

BandReport validation_bands(const LinearForecaster& model,
                            std::span<const WindowPair> windows) {
  std::vector<Spectrum> targets, preds;
  for (const auto& w : windows) {
    const Eigen::MatrixXd pred = model.apply(w.input);
    for (long c = 0; c < w.target.cols(); ++c) {
      targets.push_back(rfft(w.target.col(c)));
      preds.push_back(rfft(pred.col(c)));
    }
  }
  const BandPartition bands = band_partition(targets.front().bin_count());
  return band_rmse(targets, preds, bands);
}

}  // namespace

TrainResult train(const LinearForecaster& init_model,
                  std::span<const WindowPair> train_windows,
                  std::span<const WindowPair> val_windows,
                  const FreLEConfig& loss_cfg, const TrainConfig& train_cfg,
                  const EpochCallback& on_epoch) {
  loss_cfg.validate();
  train_cfg.validate();
  if (train_windows.empty()) throw NoData("train: no training windows");
  if (val_windows.empty()) throw NoData("train: no validation windows");

  TrainResult result;
  result.model = init_model;
  Eigen::VectorXd params = result.model.get_params();
  Eigen::VectorXd best_params = params;
  AdamState adam = AdamState::init(params.size(), train_cfg.lr);
  Rng rng(train_cfg.seed);

  std::vector<std::size_t> order(train_windows.size());
  std::iota(order.begin(), order.end(), 0);

  double best_val = std::numeric_limits<double>::infinity();
  int epochs_without_improvement = 0;

  for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    if (train_cfg.shuffle) rng.shuffle(order);

    LossBreakdown train_total;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(train_cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(),
                   begin + static_cast<std::size_t>(train_cfg.batch_size));
      const double batch_weight = 1.0 / static_cast<double>(end - begin);
      Eigen::VectorXd grads = Eigen::VectorXd::Zero(params.size());
      for (std::size_t i = begin; i < end; ++i) {
        const WindowPair& w = train_windows[order[i]];
        const Eigen::MatrixXd pred = result.model.apply(w.input);
        train_total = accumulate(train_total,
                                 frele_loss(w.target, pred, loss_cfg), 1.0);
        const Eigen::MatrixXd upstream =
            batch_weight * frele_gradient(w.target, pred, loss_cfg);
        grads += result.model.backprop(w.input, upstream);
      }
      adam_step(adam, params, grads);
      result.model.set_params(params);
    }

    EpochLog log;
    log.epoch = epoch;
    const double inv_windows = 1.0 / static_cast<double>(order.size());
    log.train_loss.time_loss = train_total.time_loss * inv_windows;
    log.train_loss.freq_loss = train_total.freq_loss * inv_windows;
    log.train_loss.combined = train_total.combined * inv_windows;
    log.val_loss = mean_loss(result.model, val_windows, loss_cfg);
    if (train_cfg.log_val_bands)
      log.val_bands = validation_bands(result.model, val_windows);
    log.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      started)
            .count();
    result.logs.push_back(log);
    if (on_epoch) on_epoch(epoch, result.model);

    if (log.val_loss.combined < best_val) {
      best_val = log.val_loss.combined;
      best_params = params;
      result.best_epoch = epoch;
      epochs_without_improvement = 0;
    } else {
      ++epochs_without_improvement;
      if (epochs_without_improvement >= train_cfg.patience) break;
    }
  }

  result.model.set_params(best_params);
  return result;
}

Metrics evaluate(const LinearForecaster& model,
                 std::span<const WindowPair> test_windows) {
  if (test_windows.empty()) throw NoData("evaluate: no test windows");
  double sq_sum = 0.0;
  double abs_sum = 0.0;
  long count = 0;
  for (const auto& w : test_windows) {
    const Eigen::MatrixXd diff = model.apply(w.input) - w.target;
    sq_sum += diff.squaredNorm();
    abs_sum += diff.cwiseAbs().sum();
    count += diff.size();
  }
  Metrics metrics;
  metrics.mse = sq_sum / static_cast<double>(count);
  metrics.mae = abs_sum / static_cast<double>(count);
  return metrics;
}

LossBreakdown mean_loss(const LinearForecaster& model,
                        std::span<const WindowPair> windows,
                        const FreLEConfig& cfg) {
  if (windows.empty()) throw NoData("mean_loss: no windows");
  LossBreakdown total;
  for (const auto& w : windows)
    total = accumulate(total, frele_loss(w.target, model.apply(w.input), cfg),
                       1.0);
  const double scale = 1.0 / static_cast<double>(windows.size());
  total.time_loss *= scale;
  total.freq_loss *= scale;
  total.combined *= scale;
  return total;
}

SnapshotSeries train_pointwise(MLPRegressor& model,
                               const Eigen::MatrixXd& inputs,
                               const Eigen::MatrixXd& targets, int iterations,
                               double lr, int snapshot_every) {
  if (inputs.cols() != targets.cols())
    throw ShapeMismatch("train_pointwise: inputs and targets disagree on n");
  if (inputs.cols() < 1) throw NoData("train_pointwise: empty dataset");
  if (iterations < 1 || snapshot_every < 1)
    throw InvalidInput("train_pointwise: iterations and snapshot_every must be positive");

  Eigen::VectorXd params = model.get_params();
  AdamState adam = AdamState::init(params.size(), lr);
  SnapshotSeries series;
  series.iterations.push_back(0);
  series.params.push_back(params);

  const long n = inputs.cols();
  const long hidden_dim = model.w1.rows();
  const long out_dim = model.w2.rows();
  Eigen::MatrixXd value(hidden_dim, n), slope(hidden_dim, n);
  Eigen::MatrixXd pred(out_dim, n), upstream(out_dim, n);
  Eigen::MatrixXd d_pre(hidden_dim, n);
  Eigen::MatrixXd d_w1(hidden_dim, model.w1.cols());
  Eigen::MatrixXd d_w2(out_dim, hidden_dim);
  Eigen::VectorXd grads(params.size());

  const double scale = 2.0 / static_cast<double>(targets.size());
  for (int iter = 1; iter <= iterations; ++iter) {
    value.noalias() = model.w1 * inputs;
    value.colwise() += model.b1;
    if (model.act.kind == Activation::tanh) {
      value = value.array().tanh();
      slope.array() = 1.0 - value.array() * value.array();
    } else {
      for (long i = 0; i < value.size(); ++i) {
        const auto [v, s] = activation(model.act, value.data()[i]);
        value.data()[i] = v;
        slope.data()[i] = s;
      }
    }
    pred.noalias() = model.w2 * value;
    pred.colwise() += model.b2;
    upstream = scale * (pred - targets);

    d_w2.noalias() = upstream * value.transpose();
    d_pre.noalias() = model.w2.transpose() * upstream;
    d_pre.array() *= slope.array();
    d_w1.noalias() = d_pre * inputs.transpose();

    long offset = 0;
    grads.segment(offset, d_w1.size()) =
        Eigen::Map<const Eigen::VectorXd>(d_w1.data(), d_w1.size());
    offset += d_w1.size();
    grads.segment(offset, hidden_dim) = d_pre.rowwise().sum();
    offset += hidden_dim;
    grads.segment(offset, d_w2.size()) =
        Eigen::Map<const Eigen::VectorXd>(d_w2.data(), d_w2.size());
    offset += d_w2.size();
    grads.segment(offset, out_dim) = upstream.rowwise().sum();

    adam_step(adam, params, grads);
    model.set_params(params);
    if (iter % snapshot_every == 0 || iter == iterations) {
      series.iterations.push_back(iter);
      series.params.push_back(params);
    }
  }
  return series;
}

}  // namespace frele
