#include "frele/timeseries.hpp"

#include <cmath>

namespace frele {

namespace {

/** Copies columns [start, start + count) with the matching metadata. */
MultiSeries slice(const MultiSeries& series, long start, long count) {
  MultiSeries out;
  out.values = series.values.middleCols(start, count);
  out.channel_names = series.channel_names;
  if (!series.timestamps.empty())
    out.timestamps.assign(series.timestamps.begin() + start,
                          series.timestamps.begin() + start + count);
  return out;
}

}  // namespace

void MultiSeries::validate() const {
  if (!channel_names.empty() &&
      channel_names.size() != static_cast<std::size_t>(channels()))
    throw ShapeMismatch("series has " + std::to_string(channels()) +
                        " channels but " +
                        std::to_string(channel_names.size()) + " names");
  if (!timestamps.empty() &&
      timestamps.size() != static_cast<std::size_t>(length()))
    throw ShapeMismatch("series has " + std::to_string(length()) +
                        " steps but " + std::to_string(timestamps.size()) +
                        " timestamps");
}

Splits time_split(const MultiSeries& series, const SplitSpec& spec) {
  series.validate();
  const long total = series.length();
  long n_train = 0, n_val = 0, n_test = 0;
  if (spec.mode == SplitMode::ett_preset) {
    n_train = 8640;
    n_val = 2880;
    n_test = 2880;
    if (total < n_train + n_val + n_test)
      throw SplitTooSmall("preset split needs 14400 rows, series has " +
                          std::to_string(total));
  } else {
    double sum = 0.0;
    for (double f : spec.fractions) {
      if (!(f > 0.0 && f < 1.0))
        throw InvalidInput("split fractions must lie strictly in (0, 1)");
      sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw InvalidInput("split fractions must sum to 1");
    n_train = static_cast<long>(std::floor(spec.fractions[0] * total));
    n_val = static_cast<long>(std::floor(spec.fractions[1] * total));
    n_test = total - n_train - n_val;
    if (n_train < 1 || n_val < 1 || n_test < 1)
      throw SplitTooSmall("series of length " + std::to_string(total) +
                          " leaves an empty split segment");
  }
  Splits out;
  out.train = slice(series, 0, n_train);
  out.val = slice(series, n_train, n_val);
  out.test = slice(series, n_train + n_val, n_test);
  return out;
}

Scaler fit_scaler(const MultiSeries& train) {
  train.validate();
  const long n = train.length();
  if (n < 2) throw SeriesTooShort("scaler needs at least 2 steps per channel");
  Scaler scaler;
  scaler.mean = train.values.rowwise().mean();
  const Eigen::MatrixXd centered = train.values.colwise() - scaler.mean;
  scaler.std =
      (centered.array().square().rowwise().sum() / static_cast<double>(n - 1))
          .sqrt();
  for (int c = 0; c < train.channels(); ++c) {
    if (!(scaler.std[c] > 1e-12)) {
      const std::string name =
          train.channel_names.empty() ? std::to_string(c)
                                      : train.channel_names[c];
      throw DegenerateChannel("channel " + name +
                              " is constant and cannot be standardized");
    }
  }
  return scaler;
}

MultiSeries apply_scaler(const Scaler& scaler, const MultiSeries& series) {
  if (scaler.mean.size() != series.channels())
    throw ShapeMismatch("scaler fit on " + std::to_string(scaler.mean.size()) +
                        " channels, series has " +
                        std::to_string(series.channels()));
  MultiSeries out = series;
  out.values = (series.values.colwise() - scaler.mean).array().colwise() /
               scaler.std.array();
  return out;
}

MultiSeries invert_scaler(const Scaler& scaler, const MultiSeries& series) {
  if (scaler.mean.size() != series.channels())
    throw ShapeMismatch("scaler fit on " + std::to_string(scaler.mean.size()) +
                        " channels, series has " +
                        std::to_string(series.channels()));
  MultiSeries out = series;
  out.values =
      (series.values.array().colwise() * scaler.std.array()).colwise() +
      scaler.mean.array();
  return out;
}

std::vector<WindowPair> make_windows(const MultiSeries& series, int lookback,
                                     int horizon, int stride) {
  series.validate();
  if (lookback < 1 || horizon < 1 || stride < 1)
    throw InvalidInput("lookback, horizon and stride must be positive");
  const long total = series.length();
  const long span = static_cast<long>(lookback) + horizon;
  if (total < span)
    throw SeriesTooShort("need " + std::to_string(span) + " steps, have " +
                         std::to_string(total));
  const long count = (total - span) / stride + 1;
  std::vector<WindowPair> windows;
  windows.reserve(static_cast<std::size_t>(count));
  for (long w = 0; w < count; ++w) {
    const long origin = w * stride;
    WindowPair pair;
    pair.origin_index = origin;
    pair.input = series.values.middleCols(origin, lookback).transpose();
    pair.target =
        series.values.middleCols(origin + lookback, horizon).transpose();
    windows.push_back(std::move(pair));
  }
  return windows;
}

}  // namespace frele
