#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "frele/loss.hpp"
#include "frele/models.hpp"
#include "frele/spectral.hpp"
#include "frele/timeseries.hpp"
#include "frele/trainer.hpp"

namespace frele {

/** Per-epoch band errors and time-domain metrics of one training run. */
struct BiasProfile {
  std::vector<BandReport> bands;
  std::vector<Metrics> metrics;
};

/**
 * Relative amplitude error |A_pred - A_true| / A_true at chosen frequencies
 * (cycles per window, i.e. bin indices) across training snapshots.
 * rel_error is iterations-by-frequencies.
 */
struct FrequencyTrajectory {
  std::vector<double> freqs;
  std::vector<int> iterations;
  Eigen::MatrixXd rel_error;
};

struct SweepPoint {
  double grid_value = 0.0;
  Metrics metrics;
  double time_loss = 0.0;
  double freq_loss = 0.0;
  std::uint64_t seed = 0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  /** Index of the point with the smallest test MSE. */
  int argmin = 0;
};

struct AblationRow {
  std::string setting;
  Metrics metrics;
};

/**
 * Everything one training run needs, shared across sweep points. Sweeps
 * derive each point's seed as train_cfg.seed + grid index, so any point can
 * be reproduced in isolation.
 */
struct ExperimentPlan {
  std::vector<WindowPair> train;
  std::vector<WindowPair> val;
  std::vector<WindowPair> test;
  LinearMode mode = LinearMode::plain;
  bool channel_shared = true;
  int channels = 1;
  int ma_kernel = 25;
  int lookback = 0;
  int horizon = 0;
  FreLEConfig loss_cfg;
  TrainConfig train_cfg;
};

/** Band RMSE of the model's test predictions against the targets. */
BandReport spectral_bias_report(const LinearForecaster& model,
                                std::span<const WindowPair> test_windows,
                                const BandPartition& bands);

/**
 * Coordinates fed to the pointwise network for the synthetic study: sample
 * index i of n mapped affinely onto [-pi, pi], as a 1-by-n input batch.
 */
Eigen::MatrixXd synth_coordinates(long n);

/**
 * Amplitude-error trajectories of a pointwise model across its snapshots.
 * arch supplies the architecture the snapshot parameter vectors fill;
 * probe_inputs are the 1-by-n coordinates and probe_truth the n true values.
 * target_freqs are cycles per window and must land on integer spectrum bins.
 */
FrequencyTrajectory frequency_trajectory(const MLPRegressor& arch,
                                         const SnapshotSeries& snapshots,
                                         const Eigen::MatrixXd& probe_inputs,
                                         const Eigen::VectorXd& probe_truth,
                                         std::span<const double> target_freqs);

/**
 * First snapshot iteration at which each frequency's relative error drops
 * below the threshold; empty when it never does.
 */
std::vector<std::optional<int>> first_crossings(
    const FrequencyTrajectory& trajectory, double threshold);

/** One full train+evaluate per delta value; fresh seed per point. */
SweepResult delta_sweep(const ExperimentPlan& plan,
                        std::span<const double> grid);

/** One full train+evaluate per retention fraction; fresh seed per point. */
SweepResult pruning_sweep(const ExperimentPlan& plan,
                          std::span<const double> retentions);

/**
 * Trains the three loss variants on identical splits and seeds: explicit
 * frequency regularization with the implicit rescale (EFR-IFR), alone
 * (EFR), and with adaptive normalization (EFR-AN).
 */
std::vector<AblationRow> ablation_matrix(const ExperimentPlan& plan);

}  // namespace frele
