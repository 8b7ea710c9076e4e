#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "frele/errors.hpp"

namespace frele {

/**
 * A multichannel series stored channels-by-time (C x L). timestamps and
 * channel_names are optional metadata; when present, timestamps has one
 * entry per time step and channel_names one per channel.
 */
struct MultiSeries {
  Eigen::MatrixXd values;
  std::vector<std::string> channel_names;
  std::vector<std::string> timestamps;

  int channels() const { return static_cast<int>(values.rows()); }
  long length() const { return values.cols(); }

  /** Throws ShapeMismatch if metadata sizes disagree with values. */
  void validate() const;
};

enum class SplitMode {
  /** Train/val/test lengths from fractions of the series length. */
  fractional,
  /** Fixed 8640 / 2880 / 2880 prefix used for the ETT hourly datasets. */
  ett_preset,
};

struct SplitSpec {
  SplitMode mode = SplitMode::fractional;
  std::array<double, 3> fractions{0.7, 0.1, 0.2};
};

struct Splits {
  MultiSeries train;
  MultiSeries val;
  MultiSeries test;
};

/**
 * Chronological, non-overlapping split. Fractional mode takes
 * floor(f_train * L) then floor(f_val * L) steps; the remainder is test.
 * The preset mode requires L >= 14400 and ignores any trailing rows.
 */
Splits time_split(const MultiSeries& series, const SplitSpec& spec);

/** Per-channel affine standardization parameters. */
struct Scaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
};

/**
 * Mean and sample standard deviation (L - 1 denominator) per channel.
 * Throws DegenerateChannel if any channel is (numerically) constant.
 */
Scaler fit_scaler(const MultiSeries& train);

/** (x - mean) / std per channel. */
MultiSeries apply_scaler(const Scaler& scaler, const MultiSeries& series);

/** x * std + mean per channel; inverse of apply_scaler. */
MultiSeries invert_scaler(const Scaler& scaler, const MultiSeries& series);

/**
 * One supervised example: lookback rows feed the model, the horizon rows
 * that immediately follow are the target. Both are time-by-channels.
 */
struct WindowPair {
  Eigen::MatrixXd input;
  Eigen::MatrixXd target;
  long origin_index = 0;
};

/**
 * All windows whose input starts at origin 0, stride, 2*stride, ... and
 * whose target still fits; the input ends exactly where the target begins.
 * Throws SeriesTooShort if not even one window fits.
 */
std::vector<WindowPair> make_windows(const MultiSeries& series, int lookback,
                                     int horizon, int stride = 1);

}  // namespace frele
