#include "frele/diagnostics.hpp"

#include <cmath>
#include <numbers>

namespace frele {

namespace {

/** Initializes the plan's model shape and runs one training to completion. */
TrainResult run_plan(const ExperimentPlan& plan, const FreLEConfig& loss_cfg,
                     std::uint64_t seed) {
  const LinearForecaster start = LinearForecaster::init(
      plan.mode, plan.lookback, plan.horizon, seed, plan.channel_shared,
      plan.channels, plan.ma_kernel);
  TrainConfig train_cfg = plan.train_cfg;
  train_cfg.seed = seed;
  return train(start, plan.train, plan.val, loss_cfg, train_cfg);
}

SweepPoint run_sweep_point(const ExperimentPlan& plan,
                           const FreLEConfig& loss_cfg, double grid_value,
                           std::uint64_t seed) {
  const TrainResult result = run_plan(plan, loss_cfg, seed);
  SweepPoint point;
  point.grid_value = grid_value;
  point.metrics = evaluate(result.model, plan.test);
  const LossBreakdown test_loss = mean_loss(result.model, plan.test, loss_cfg);
  point.time_loss = test_loss.time_loss;
  point.freq_loss = test_loss.freq_loss;
  point.seed = seed;
  return point;
}

int argmin_mse(const std::vector<SweepPoint>& points) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(points.size()); ++i)
    if (points[static_cast<std::size_t>(i)].metrics.mse <
        points[static_cast<std::size_t>(best)].metrics.mse)
      best = i;
  return best;
}

void require_plan_data(const ExperimentPlan& plan) {
  if (plan.train.empty() || plan.val.empty() || plan.test.empty())
    throw NoData("sweep plan needs train, validation and test windows");
}

}  // namespace

BandReport spectral_bias_report(const LinearForecaster& model,
                                std::span<const WindowPair> test_windows,
                                const BandPartition& bands) {
  if (test_windows.empty()) throw NoData("spectral_bias_report: no windows");
  std::vector<Spectrum> targets, preds;
  targets.reserve(test_windows.size());
  preds.reserve(test_windows.size());
  for (const auto& w : test_windows) {
    const Eigen::MatrixXd pred = model.apply(w.input);
    for (long c = 0; c < w.target.cols(); ++c) {
      targets.push_back(rfft(w.target.col(c)));
      preds.push_back(rfft(pred.col(c)));
    }
  }
  return band_rmse(targets, preds, bands);
}

Eigen::MatrixXd synth_coordinates(long n) {
  if (n < 2) throw InvalidInput("synth_coordinates: need at least 2 points");
  Eigen::MatrixXd coords(1, n);
  for (long i = 0; i < n; ++i)
    coords(0, i) = (2.0 * static_cast<double>(i) / static_cast<double>(n - 1) -
                    1.0) *
                   std::numbers::pi;
  return coords;
}

FrequencyTrajectory frequency_trajectory(const MLPRegressor& arch,
                                         const SnapshotSeries& snapshots,
                                         const Eigen::MatrixXd& probe_inputs,
                                         const Eigen::VectorXd& probe_truth,
                                         std::span<const double> target_freqs) {
  if (snapshots.params.empty()) throw NoData("frequency_trajectory: no snapshots");
  if (probe_inputs.cols() != probe_truth.size())
    throw ShapeMismatch("frequency_trajectory: probe inputs and truth disagree");
  if (target_freqs.empty())
    throw InvalidInput("frequency_trajectory: no target frequencies");

  const Spectrum truth_spectrum = rfft(probe_truth);
  const Eigen::VectorXd truth_amp = amplitudes(truth_spectrum);
  std::vector<int> bins;
  for (double f : target_freqs) {
    const double rounded = std::round(f);
    if (std::abs(f - rounded) > 1e-9)
      throw NonIntegerFrequency("frequency " + std::to_string(f) +
                                " does not land on a spectrum bin");
    const int bin = static_cast<int>(rounded);
    if (bin < 0 || bin >= truth_spectrum.bin_count())
      throw InvalidFrequency("frequency " + std::to_string(f) +
                             " is outside the resolvable range");
    if (truth_amp[bin] == 0.0)
      throw InvalidInput("true amplitude at frequency " + std::to_string(f) +
                         " is zero; relative error is undefined");
    bins.push_back(bin);
  }

  FrequencyTrajectory trajectory;
  trajectory.freqs.assign(target_freqs.begin(), target_freqs.end());
  trajectory.iterations = snapshots.iterations;
  trajectory.rel_error.resize(static_cast<long>(snapshots.params.size()),
                              static_cast<long>(bins.size()));
  MLPRegressor model = arch;
  for (std::size_t s = 0; s < snapshots.params.size(); ++s) {
    model.set_params(snapshots.params[s]);
    const Eigen::VectorXd outputs =
        model.apply_batch(probe_inputs).row(0).transpose();
    const Eigen::VectorXd pred_amp = amplitudes(rfft(outputs));
    for (std::size_t f = 0; f < bins.size(); ++f) {
      const int bin = bins[f];
      trajectory.rel_error(static_cast<long>(s), static_cast<long>(f)) =
          std::abs(pred_amp[bin] - truth_amp[bin]) / truth_amp[bin];
    }
  }
  return trajectory;
}

std::vector<std::optional<int>> first_crossings(
    const FrequencyTrajectory& trajectory, double threshold) {
  std::vector<std::optional<int>> crossings(
      static_cast<std::size_t>(trajectory.rel_error.cols()));
  for (long f = 0; f < trajectory.rel_error.cols(); ++f) {
    for (long s = 0; s < trajectory.rel_error.rows(); ++s) {
      if (trajectory.rel_error(s, f) < threshold) {
        crossings[static_cast<std::size_t>(f)] =
            trajectory.iterations[static_cast<std::size_t>(s)];
        break;
      }
    }
  }
  return crossings;
}

SweepResult delta_sweep(const ExperimentPlan& plan,
                        std::span<const double> grid) {
  require_plan_data(plan);
  if (grid.empty()) throw InvalidInput("delta_sweep: empty grid");
  SweepResult result;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0))
      throw InvalidInput("delta_sweep: grid value outside [0, 1]");
    FreLEConfig cfg = plan.loss_cfg;
    cfg.delta = grid[i];
    result.points.push_back(run_sweep_point(
        plan, cfg, grid[i], plan.train_cfg.seed + static_cast<std::uint64_t>(i)));
  }
  result.argmin = argmin_mse(result.points);
  return result;
}

SweepResult pruning_sweep(const ExperimentPlan& plan,
                          std::span<const double> retentions) {
  require_plan_data(plan);
  if (retentions.empty()) throw InvalidInput("pruning_sweep: empty grid");
  SweepResult result;
  for (std::size_t i = 0; i < retentions.size(); ++i) {
    FreLEConfig cfg = plan.loss_cfg;
    cfg.epsilon_xi.reset();
    cfg.retention = retentions[i];
    cfg.validate();
    result.points.push_back(
        run_sweep_point(plan, cfg, retentions[i],
                        plan.train_cfg.seed + static_cast<std::uint64_t>(i)));
  }
  result.argmin = argmin_mse(result.points);
  return result;
}

std::vector<AblationRow> ablation_matrix(const ExperimentPlan& plan) {
  require_plan_data(plan);
  std::vector<AblationRow> rows;
  const auto run_variant = [&](const std::string& name, bool implicit_on,
                               bool an_on) {
    FreLEConfig cfg = plan.loss_cfg;
    cfg.implicit_enabled = implicit_on;
    cfg.an_enabled = an_on;
    cfg.validate();
    const TrainResult result = run_plan(plan, cfg, plan.train_cfg.seed);
    rows.push_back({name, evaluate(result.model, plan.test)});
  };
  run_variant("EFR-IFR", true, false);
  run_variant("EFR", false, false);
  run_variant("EFR-AN", false, true);
  return rows;
}

}  // namespace frele
