#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "frele/timeseries.hpp"

using namespace frele;

namespace {

MultiSeries ramp_series(int channels, long length) {
  MultiSeries s;
  s.values.resize(channels, length);
  for (int c = 0; c < channels; ++c)
    for (long t = 0; t < length; ++t)
      s.values(c, t) = static_cast<double>(t + 10 * c);
  return s;
}

}  // namespace

TEST_CASE("fractional split takes floors and gives the rest to test") {
  const MultiSeries s = ramp_series(1, 10);

  SplitSpec spec;
  spec.fractions = {0.6, 0.2, 0.2};
  Splits splits = time_split(s, spec);
  CHECK(splits.train.length() == 6);
  CHECK(splits.val.length() == 2);
  CHECK(splits.test.length() == 2);

  spec.fractions = {0.5, 0.25, 0.25};
  splits = time_split(s, spec);
  CHECK(splits.train.length() == 5);
  CHECK(splits.val.length() == 2);
  CHECK(splits.test.length() == 3);

  CHECK(splits.train.values(0, 0) == 0.0);
  CHECK(splits.val.values(0, 0) == 5.0);
  CHECK(splits.test.values(0, 2) == 9.0);
}

TEST_CASE("split segments are chronological and non-overlapping") {
  const MultiSeries s = ramp_series(2, 100);
  SplitSpec spec;
  spec.fractions = {0.7, 0.1, 0.2};
  const Splits splits = time_split(s, spec);
  CHECK(splits.train.length() + splits.val.length() + splits.test.length() ==
        100);
  CHECK(splits.train.values(0, splits.train.length() - 1) + 1 ==
        splits.val.values(0, 0));
  CHECK(splits.val.values(0, splits.val.length() - 1) + 1 ==
        splits.test.values(0, 0));
}

TEST_CASE("preset split fixes 8640/2880/2880 and drops the tail") {
  const MultiSeries s = ramp_series(1, 17420);
  SplitSpec spec;
  spec.mode = SplitMode::ett_preset;
  const Splits splits = time_split(s, spec);
  CHECK(splits.train.length() == 8640);
  CHECK(splits.val.length() == 2880);
  CHECK(splits.test.length() == 2880);
  CHECK(splits.test.values(0, 2879) == 14399.0);

  const MultiSeries tiny = ramp_series(1, 14399);
  CHECK_THROWS_AS(time_split(tiny, spec), SplitTooSmall);
}

TEST_CASE("degenerate fraction splits are rejected") {
  const MultiSeries s = ramp_series(1, 4);
  SplitSpec spec;
  spec.fractions = {0.9, 0.05, 0.05};
  CHECK_THROWS_AS(time_split(s, spec), SplitTooSmall);

  spec.fractions = {0.5, 0.2, 0.2};
  CHECK_THROWS_AS(time_split(ramp_series(1, 10), spec), InvalidInput);
}

TEST_CASE("scaler uses the sample standard deviation") {
  MultiSeries s;
  s.values.resize(1, 3);
  s.values << 2, 4, 6;
  const Scaler scaler = fit_scaler(s);
  CHECK(scaler.mean[0] == doctest::Approx(4.0));
  CHECK(scaler.std[0] == doctest::Approx(2.0));

  const MultiSeries scaled = apply_scaler(scaler, s);
  CHECK(scaled.values(0, 0) == doctest::Approx(-1.0));
  CHECK(scaled.values(0, 1) == doctest::Approx(0.0));
  CHECK(scaled.values(0, 2) == doctest::Approx(1.0));

  const MultiSeries back = invert_scaler(scaler, scaled);
  CHECK((back.values - s.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("constant channels cannot be standardized") {
  MultiSeries s;
  s.values.resize(2, 3);
  s.values << 1, 2, 3, 5, 5, 5;
  CHECK_THROWS_AS(fit_scaler(s), DegenerateChannel);
}

TEST_CASE("scaler application checks channel count") {
  const Scaler scaler = fit_scaler(ramp_series(2, 5));
  const MultiSeries other = ramp_series(3, 5);
  CHECK_THROWS_AS(apply_scaler(scaler, other), ShapeMismatch);
  CHECK_THROWS_AS(invert_scaler(scaler, other), ShapeMismatch);
}

TEST_CASE("window extraction walks origins by stride") {
  const MultiSeries s = ramp_series(1, 5);
  const auto windows = make_windows(s, 2, 1);
  REQUIRE(windows.size() == 3);
  CHECK(windows[0].origin_index == 0);
  CHECK(windows[1].origin_index == 1);
  CHECK(windows[2].origin_index == 2);
  CHECK(windows[0].input.rows() == 2);
  CHECK(windows[0].input.cols() == 1);
  CHECK(windows[0].input(0, 0) == 0.0);
  CHECK(windows[0].input(1, 0) == 1.0);
  CHECK(windows[0].target(0, 0) == 2.0);
  CHECK(windows[2].target(0, 0) == 4.0);
}

TEST_CASE("window count follows floor((L - T - S) / stride) + 1") {
  const MultiSeries s = ramp_series(2, 40);
  CHECK(make_windows(s, 8, 4, 1).size() == 29);
  CHECK(make_windows(s, 8, 4, 5).size() == 6);
  CHECK(make_windows(s, 8, 4, 100).size() == 1);
}

TEST_CASE("input ends exactly where the target begins") {
  const MultiSeries s = ramp_series(3, 30);
  for (const auto& w : make_windows(s, 6, 3, 4)) {
    for (int c = 0; c < 3; ++c)
      CHECK(w.input(5, c) + 1.0 == w.target(0, c));
  }
}

TEST_CASE("too-short series raise rather than emit zero windows") {
  const MultiSeries s = ramp_series(1, 5);
  CHECK_THROWS_AS(make_windows(s, 4, 2), SeriesTooShort);
  CHECK_THROWS_AS(make_windows(s, 0, 2), InvalidInput);
}
