#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "frele/errors.hpp"

namespace frele {

enum class Activation { relu, tanh, ricker };

struct ActivationKind {
  Activation kind = Activation::tanh;
  /** Width parameter of the ricker wavelet; ignored by relu/tanh. */
  double a = 1.0;
};

/** Value and analytic derivative at x. relu's derivative at 0 is 0. */
std::pair<double, double> activation(const ActivationKind& act, double x);

/**
 * Two-layer perceptron out = W2 * act(W1 * x + b1) + b2 with hand-written
 * backpropagation. Parameters flatten in the order w1, b1, w2, b2, each
 * array column-major.
 */
struct MLPRegressor {
  ActivationKind act;
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;

  /** Weights and biases uniform in +-1/sqrt(fan_in), seeded. */
  static MLPRegressor init(int in_dim, int hidden, int out_dim,
                           const ActivationKind& act, std::uint64_t seed);

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  /** Forward pass on a batch of column vectors (in x n -> out x n). */
  Eigen::MatrixXd apply_batch(const Eigen::MatrixXd& inputs) const;

  /**
   * Parameter gradient (flattened) for the batch given upstream
   * d(loss)/d(output), summed over the batch columns.
   */
  Eigen::VectorXd backprop_batch(const Eigen::MatrixXd& inputs,
                                 const Eigen::MatrixXd& upstream) const;

  long param_count() const;
  Eigen::VectorXd get_params() const;
  void set_params(const Eigen::VectorXd& params);
};

enum class LinearMode { plain, decomposed };

/**
 * One-layer linear forecaster mapping a lookback block to a horizon block
 * channel by channel. Plain mode applies one weight matrix; decomposed mode
 * splits the input into a centered-moving-average trend (edges padded by
 * replication) and a seasonal remainder, maps each with its own matrix and
 * sums. With channel_shared one weight set serves every channel; otherwise
 * each channel owns a set. The bias over the horizon is always shared.
 * Parameters flatten in the order weights (trend then seasonal per channel
 * in decomposed mode), then bias, each array column-major.
 */
struct LinearForecaster {
  LinearMode mode = LinearMode::plain;
  int lookback = 0;
  int horizon = 0;
  int ma_kernel = 25;
  bool channel_shared = true;
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::MatrixXd> trend_weights;
  std::vector<Eigen::MatrixXd> seasonal_weights;
  Eigen::VectorXd bias;

  /**
   * Uniform +-1/sqrt(lookback) init, seeded. channels matters only when
   * channel_shared is false (one weight set per channel).
   */
  static LinearForecaster init(LinearMode mode, int lookback, int horizon,
                               std::uint64_t seed, bool channel_shared = true,
                               int channels = 1, int ma_kernel = 25);

  /** Forecast (lookback x channels -> horizon x channels). */
  Eigen::MatrixXd apply(const Eigen::MatrixXd& input) const;

  /** Flattened parameter gradient given upstream d(loss)/d(output). */
  Eigen::VectorXd backprop(const Eigen::MatrixXd& input,
                           const Eigen::MatrixXd& upstream) const;

  long param_count() const;
  Eigen::VectorXd get_params() const;
  void set_params(const Eigen::VectorXd& params);

  /** Throws InvalidInput on bad kernel or non-finite parameters. */
  void validate() const;
};

/**
 * Centered moving average per column with replicated edge padding; kernel
 * must be odd and >= 3. Output has the input's shape.
 */
Eigen::MatrixXd moving_average_trend(const Eigen::MatrixXd& input, int kernel);

/** JSON checkpoints; round-trip reproduces every parameter bit-for-bit. */
void save_checkpoint(const std::string& path, const LinearForecaster& model);
void save_checkpoint(const std::string& path, const MLPRegressor& model);
LinearForecaster load_linear_checkpoint(const std::string& path);
MLPRegressor load_mlp_checkpoint(const std::string& path);

}  // namespace frele
