#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "frele/loss.hpp"
#include "frele/models.hpp"
#include "frele/spectral.hpp"
#include "frele/timeseries.hpp"

namespace frele {

/** Adam optimizer state for one flat parameter vector. */
struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState init(long size, double lr);
};

/** One bias-corrected Adam update, in place. */
void adam_step(AdamState& state, Eigen::VectorXd& params,
               const Eigen::VectorXd& grads);

struct TrainConfig {
  int epochs = 30;
  int batch_size = 32;
  double lr = 0.005;
  /** Epochs without strict validation improvement before stopping. */
  int patience = 3;
  std::uint64_t seed = 1;
  bool shuffle = true;
  /** Record a per-epoch BandReport on the validation windows. */
  bool log_val_bands = false;

  void validate() const;
};

struct EpochLog {
  int epoch = 0;
  LossBreakdown train_loss;
  LossBreakdown val_loss;
  std::optional<BandReport> val_bands;
  /** Kept out of CSV outputs so reruns stay byte-identical. */
  double wall_time_s = 0.0;
};

struct TrainResult {
  LinearForecaster model;
  std::vector<EpochLog> logs;
  /** Index into logs of the epoch whose parameters were returned. */
  int best_epoch = 0;
};

/** Called after every epoch with the current (not best) model. */
using EpochCallback = std::function<void(int epoch, const LinearForecaster&)>;

/**
 * Seeded mini-batch Adam training of the forecaster on the combined loss,
 * early-stopped on the validation combined loss, returning the parameters
 * of the best validation epoch. Fully deterministic for a fixed config:
 * shuffling comes from the seeded generator and every reduction runs in a
 * fixed order.
 */
TrainResult train(const LinearForecaster& init_model,
                  std::span<const WindowPair> train_windows,
                  std::span<const WindowPair> val_windows,
                  const FreLEConfig& loss_cfg, const TrainConfig& train_cfg,
                  const EpochCallback& on_epoch = {});

struct Metrics {
  double mse = 0.0;
  double mae = 0.0;
};

/** MSE/MAE over all horizon points, channels and windows. */
Metrics evaluate(const LinearForecaster& model,
                 std::span<const WindowPair> test_windows);

/** Mean loss breakdown of the model's predictions over the windows. */
LossBreakdown mean_loss(const LinearForecaster& model,
                        std::span<const WindowPair> windows,
                        const FreLEConfig& cfg);

/** Flat parameter vectors captured during pointwise training. */
struct SnapshotSeries {
  std::vector<int> iterations;
  std::vector<Eigen::VectorXd> params;
};

/**
 * Full-batch Adam regression of the MLP onto (inputs, targets), minimizing
 * MSE, mutating the model in place. Snapshots are taken before training and
 * then every snapshot_every iterations (plus the final one).
 */
SnapshotSeries train_pointwise(MLPRegressor& model,
                               const Eigen::MatrixXd& inputs,
                               const Eigen::MatrixXd& targets, int iterations,
                               double lr, int snapshot_every);

}  // namespace frele
