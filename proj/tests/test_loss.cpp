#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "frele/loss.hpp"
#include "frele/rng.hpp"

using namespace frele;

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = scale * rng.normal();
  return m;
}

double finite_difference(const Eigen::MatrixXd& target, Eigen::MatrixXd pred,
                         const FreLEConfig& cfg, int r, int c) {
  const double h = 1e-6;
  pred(r, c) += h;
  const double up = frele_loss(target, pred, cfg).combined;
  pred(r, c) -= 2.0 * h;
  const double down = frele_loss(target, pred, cfg).combined;
  return (up - down) / (2.0 * h);
}

void check_gradient(const FreLEConfig& cfg, std::uint64_t seed, int trials) {
  Rng rng(seed);
  for (int trial = 0; trial < trials; ++trial) {
    const Eigen::MatrixXd target = random_matrix(rng, 8, 2);
    const Eigen::MatrixXd pred = random_matrix(rng, 8, 2);
    const Eigen::MatrixXd grad = frele_gradient(target, pred, cfg);
    for (int c = 0; c < 2; ++c) {
      for (int r = 0; r < 8; ++r) {
        const double fd = finite_difference(target, pred, cfg, r, c);
        CAPTURE(trial);
        CAPTURE(r);
        CAPTURE(c);
        CHECK(std::abs(grad(r, c) - fd) <=
              1e-4 * std::max(std::abs(grad(r, c)), std::abs(fd)) + 1e-8);
      }
    }
  }
}

Spectrum spectrum_from(std::initializer_list<std::complex<double>> bins,
                       int origin_length) {
  Spectrum s;
  s.origin_length = origin_length;
  s.bins.resize(static_cast<long>(bins.size()));
  long i = 0;
  for (auto b : bins) s.bins[i++] = b;
  return s;
}

}  // namespace

TEST_CASE("time_loss values and gradients on pinned inputs") {
  Eigen::MatrixXd x(1, 1), xhat(1, 1);
  x << 0.0;
  xhat << 2.0;
  auto [mae, mae_grad] = time_loss(x, xhat, TimeLossKind::mae);
  CHECK(mae == doctest::Approx(2.0));
  CHECK(mae_grad(0, 0) == doctest::Approx(1.0));

  auto [mse, mse_grad] = time_loss(x, xhat, TimeLossKind::mse);
  CHECK(mse == doctest::Approx(4.0));
  CHECK(mse_grad(0, 0) == doctest::Approx(4.0));

  auto [zero, zero_grad] = time_loss(x, x, TimeLossKind::mae);
  CHECK(zero == 0.0);
  CHECK(zero_grad(0, 0) == 0.0);
}

TEST_CASE("time_loss matches finite differences away from ties") {
  Rng rng(55);
  for (TimeLossKind kind : {TimeLossKind::mae, TimeLossKind::mse}) {
    const Eigen::MatrixXd target = random_matrix(rng, 5, 3);
    const Eigen::MatrixXd pred = random_matrix(rng, 5, 3);
    const Eigen::MatrixXd grad = time_loss(target, pred, kind).second;
    for (int c = 0; c < 3; ++c) {
      for (int r = 0; r < 5; ++r) {
        const double h = 1e-6;
        Eigen::MatrixXd bumped = pred;
        bumped(r, c) += h;
        const double up = time_loss(target, bumped, kind).first;
        bumped(r, c) -= 2.0 * h;
        const double down = time_loss(target, bumped, kind).first;
        const double fd = (up - down) / (2.0 * h);
        CHECK(std::abs(grad(r, c) - fd) <=
              1e-4 * std::max(std::abs(grad(r, c)), std::abs(fd)) + 1e-8);
      }
    }
  }
}

TEST_CASE("time_loss rejects mismatched shapes") {
  CHECK_THROWS_AS(
      time_loss(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 2),
                TimeLossKind::mae),
      ShapeMismatch);
}

TEST_CASE("local_maxima picks non-strict window maxima, never the DC bin") {
  Eigen::VectorXd a(5);
  a << 1, 3, 2, 5, 4;
  CHECK(local_maxima(a, 2) == std::vector<int>{1, 3});
  CHECK(local_maxima(a, 3) == std::vector<int>{3});

  Eigen::VectorXd down(6);
  down << 9, 8, 7, 6, 5, 4;
  CHECK(local_maxima(down, 2).empty());
  CHECK(local_maxima(down, 5).empty());

  CHECK_THROWS_AS(local_maxima(a, 0), InvalidInput);
}

TEST_CASE("local_maxima agrees with an exhaustive window scan") {
  Rng rng(202);
  for (int trial = 0; trial < 1000; ++trial) {
    const int b = 1 + static_cast<int>(rng.bounded(40));
    const int d = 1 + static_cast<int>(rng.bounded(9));
    Eigen::VectorXd a(b);
    for (int i = 0; i < b; ++i) a[i] = rng.uniform(0.0, 10.0);
    std::vector<int> expected;
    for (int i = 1; i < b; ++i) {
      bool is_max = true;
      for (int j = i - d / 2; j <= i + (d + 1) / 2; ++j) {
        if (j < 0 || j >= b) continue;
        if (a[j] > a[i]) is_max = false;
      }
      if (is_max) expected.push_back(i);
    }
    CAPTURE(trial);
    CHECK(local_maxima(a, d) == expected);
  }
}

TEST_CASE("implicit_rescale multiplies chosen bins by index/eta") {
  const Spectrum s =
      spectrum_from({10.0, {2.0, 2.0}, 4.0, 1.0, 0.5}, 8);

  SUBCASE("pinned example") {
    const std::vector<int> maxima{2};
    const Spectrum out = implicit_rescale(s, maxima, 4.0);
    CHECK(out.bins[2].real() == doctest::Approx(2.0));
    CHECK(out.bins[0] == s.bins[0]);
    CHECK(out.bins[1] == s.bins[1]);
    CHECK(out.bins[3] == s.bins[3]);
  }
  SUBCASE("empty maxima set is the identity") {
    const std::vector<int> none;
    const Spectrum out = implicit_rescale(s, none, 4.0);
    CHECK((out.bins - s.bins).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("eta equal to the index leaves the bin unchanged") {
    const std::vector<int> maxima{3};
    const Spectrum out = implicit_rescale(s, maxima, 3.0);
    CHECK(out.bins[3] == s.bins[3]);
  }
  SUBCASE("input spectrum is not mutated") {
    const std::vector<int> maxima{1};
    (void)implicit_rescale(s, maxima, 2.0);
    CHECK(s.bins[1] == std::complex<double>(2.0, 2.0));
  }
  SUBCASE("DC and out-of-range indices are rejected") {
    const std::vector<int> dc{0};
    CHECK_THROWS_AS(implicit_rescale(s, dc, 4.0), InvalidIndex);
    const std::vector<int> beyond{5};
    CHECK_THROWS_AS(implicit_rescale(s, beyond, 4.0), InvalidIndex);
    const std::vector<int> fine{1};
    CHECK_THROWS_AS(implicit_rescale(s, fine, 0.0), InvalidInput);
  }
}

TEST_CASE("implicit_rescale commutes with scalar multiplication") {
  Rng rng(8);
  Spectrum s;
  s.origin_length = 12;
  s.bins.resize(7);
  for (int k = 0; k < 7; ++k) s.bins[k] = {rng.normal(), rng.normal()};
  const std::vector<int> maxima{2, 5};
  const std::complex<double> c{1.5, -0.5};
  Spectrum scaled = s;
  scaled.bins *= c;
  const Spectrum lhs = implicit_rescale(scaled, maxima, 7.0);
  Spectrum rhs = implicit_rescale(s, maxima, 7.0);
  rhs.bins *= c;
  CHECK((lhs.bins - rhs.bins).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("freq_loss is the mean modulus of bin differences") {
  const Spectrum f = spectrum_from({1.0, 0.0}, 2);
  const Spectrum fhat = spectrum_from({0.0, {0.0, 1.0}}, 2);
  const std::vector<Spectrum> targets{f};
  const std::vector<Spectrum> preds{fhat};
  CHECK(freq_loss(targets, preds) == doctest::Approx(1.0));
  CHECK(freq_loss(targets, targets) == 0.0);
}

TEST_CASE("freq_loss matches a brute-force loop on random spectra") {
  Rng rng(404);
  std::vector<Spectrum> targets, preds;
  double sum = 0.0;
  long bins = 0;
  for (int i = 0; i < 6; ++i) {
    Spectrum t, p;
    t.origin_length = p.origin_length = 16;
    t.bins.resize(9);
    p.bins.resize(9);
    for (int k = 0; k < 9; ++k) {
      t.bins[k] = {rng.normal(), rng.normal()};
      p.bins[k] = {rng.normal(), rng.normal()};
      sum += std::abs(t.bins[k] - p.bins[k]);
      ++bins;
    }
    targets.push_back(t);
    preds.push_back(p);
  }
  CHECK(freq_loss(targets, preds) ==
        doctest::Approx(sum / static_cast<double>(bins)).epsilon(1e-12));
}

TEST_CASE("freq_loss validates shapes") {
  const Spectrum f = spectrum_from({1.0, 0.0}, 2);
  const std::vector<Spectrum> one{f};
  const std::vector<Spectrum> two{f, f};
  CHECK_THROWS_AS(freq_loss(one, two), ShapeMismatch);
  const std::vector<Spectrum> none;
  CHECK_THROWS_AS(freq_loss(none, none), NoData);
}

TEST_CASE("amplitude_filter zeroes bins below the threshold") {
  const Spectrum s = spectrum_from({5.0, 3.0, 1.0}, 4);

  auto [identity, full] = amplitude_filter(s, 0.0);
  CHECK((identity.bins - s.bins).cwiseAbs().maxCoeff() == 0.0);
  CHECK(full == 1.0);

  auto [filtered, retention] = amplitude_filter(s, 2.0);
  CHECK(filtered.bins[0] == std::complex<double>(5.0, 0.0));
  CHECK(filtered.bins[1] == std::complex<double>(3.0, 0.0));
  CHECK(filtered.bins[2] == std::complex<double>(0.0, 0.0));
  CHECK(retention == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("retention is non-increasing in the threshold") {
  Rng rng(77);
  Spectrum s;
  s.origin_length = 20;
  s.bins.resize(11);
  for (int k = 0; k < 11; ++k) s.bins[k] = {rng.normal(), rng.normal()};
  double previous = 1.0;
  for (double eps = 0.0; eps <= 3.0; eps += 0.1) {
    const double retention = amplitude_filter(s, eps).second;
    CHECK(retention <= previous);
    previous = retention;
  }
}

TEST_CASE("threshold_for_retention keeps exactly the allowed fraction") {
  Spectrum s;
  s.origin_length = 18;
  s.bins.resize(10);
  for (int k = 0; k < 10; ++k)
    s.bins[k] = static_cast<double>((3 * k + 5) % 17) + 1.0;

  const double eps = threshold_for_retention(s, 0.8);
  const auto [filtered, retention] = amplitude_filter(s, eps);
  int survivors = 0;
  for (int k = 0; k < 10; ++k) survivors += filtered.bins[k] != 0.0;
  CHECK(survivors == 8);
  CHECK(retention == doctest::Approx(0.8));

  CHECK(threshold_for_retention(s, 1.0) == 0.0);
  CHECK_THROWS_AS(threshold_for_retention(s, 0.0), InvalidInput);
  CHECK_THROWS_AS(threshold_for_retention(s, 1.5), InvalidInput);
}

TEST_CASE("threshold_for_retention never keeps more than asked, even on ties") {
  Spectrum s;
  s.origin_length = 10;
  s.bins.resize(6);
  s.bins << 2.0, 1.0, 1.0, 1.0, 5.0, 4.0;
  const double eps = threshold_for_retention(s, 0.5);
  CHECK(amplitude_filter(s, eps).second <= 0.5);
}

TEST_CASE("config validation rejects out-of-domain settings") {
  FreLEConfig cfg;
  cfg.validate();

  FreLEConfig bad_delta = cfg;
  bad_delta.delta = 1.5;
  CHECK_THROWS_AS(bad_delta.validate(), InvalidInput);

  FreLEConfig both = cfg;
  both.an_enabled = true;
  CHECK_THROWS_AS(both.validate(), InvalidInput);

  FreLEConfig both_prune = cfg;
  both_prune.epsilon_xi = 0.1;
  both_prune.retention = 0.8;
  CHECK_THROWS_AS(both_prune.validate(), InvalidInput);

  FreLEConfig bad_eta = cfg;
  bad_eta.eta = -1.0;
  CHECK_THROWS_AS(bad_eta.validate(), InvalidInput);
}

TEST_CASE("frele_loss endpoints and pinned value") {
  Eigen::MatrixXd x(4, 1), zero(4, 1);
  x << 0, 1, 0, -1;
  zero.setZero();

  SUBCASE("delta=1 with rescaling off is the pure spectrum MAE") {
    FreLEConfig cfg;
    cfg.delta = 1.0;
    cfg.implicit_enabled = false;
    const LossBreakdown loss = frele_loss(x, zero, cfg);
    CHECK(loss.freq_loss == doctest::Approx(2.0 / 3.0));
    CHECK(loss.combined == doctest::Approx(2.0 / 3.0));
    CHECK(loss.time_loss == doctest::Approx(0.5));
  }
  SUBCASE("delta=0 reduces to the time loss exactly") {
    FreLEConfig cfg;
    cfg.delta = 0.0;
    const LossBreakdown loss = frele_loss(x, zero, cfg);
    CHECK(loss.combined == loss.time_loss);
  }
  SUBCASE("perfect prediction is zero under every toggle") {
    for (int variant = 0; variant < 3; ++variant) {
      FreLEConfig cfg;
      cfg.implicit_enabled = variant == 1;
      cfg.an_enabled = variant == 2;
      const LossBreakdown loss = frele_loss(x, x, cfg);
      CHECK(loss.time_loss == 0.0);
      CHECK(loss.freq_loss == 0.0);
      CHECK(loss.combined == 0.0);
    }
  }
}

TEST_CASE("combined loss is affine in delta") {
  Rng rng(9001);
  const Eigen::MatrixXd target = random_matrix(rng, 12, 2);
  const Eigen::MatrixXd pred = random_matrix(rng, 12, 2);
  FreLEConfig at_zero, at_one;
  at_zero.delta = 0.0;
  at_one.delta = 1.0;
  const double lo = frele_loss(target, pred, at_zero).combined;
  const double hi = frele_loss(target, pred, at_one).combined;
  for (double delta : {0.1, 0.3, 0.5, 0.77}) {
    FreLEConfig cfg;
    cfg.delta = delta;
    const double mid = frele_loss(target, pred, cfg).combined;
    CHECK(std::abs(mid - (delta * hi + (1.0 - delta) * lo)) < 1e-12);
  }
}

TEST_CASE("loss is non-negative and zero only at equality") {
  Rng rng(12);
  FreLEConfig cfg;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd target = random_matrix(rng, 10, 3);
    const Eigen::MatrixXd pred = random_matrix(rng, 10, 3);
    const LossBreakdown loss = frele_loss(target, pred, cfg);
    CHECK(loss.combined > 0.0);
  }
}

TEST_CASE("weighted pipeline equals literal operation composition") {
  // The production path folds mask and rescale into one per-bin factor; this
  // rebuilds the loss by applying the operations to both spectra and calling
  // freq_loss, which must agree to rounding.
  Rng rng(321);
  FreLEConfig cfg;
  cfg.delta = 1.0;
  cfg.epsilon_xi = 0.8;
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::MatrixXd target = random_matrix(rng, 16, 2);
    const Eigen::MatrixXd pred = random_matrix(rng, 16, 2);
    std::vector<Spectrum> ts, ps;
    for (int c = 0; c < 2; ++c) {
      Spectrum t = rfft(target.col(c));
      Spectrum p = rfft(pred.col(c));
      const Eigen::VectorXd amp = amplitudes(t);
      for (int k = 0; k < t.bin_count(); ++k) {
        if (amp[k] < *cfg.epsilon_xi) {
          t.bins[k] = 0.0;
          p.bins[k] = 0.0;
        }
      }
      const auto maxima = local_maxima(amp, cfg.d);
      const double eta = static_cast<double>(t.bin_count());
      ts.push_back(implicit_rescale(t, maxima, eta));
      ps.push_back(implicit_rescale(p, maxima, eta));
    }
    const double composed = freq_loss(ts, ps);
    const double folded = frele_loss(target, pred, cfg).freq_loss;
    CHECK(composed == doctest::Approx(folded).epsilon(1e-12));
  }
}

TEST_CASE("gradient matches finite differences in every configuration") {
  for (double delta : {0.3, 1.0}) {
    for (int variant = 0; variant < 3; ++variant) {
      for (TimeLossKind kind : {TimeLossKind::mae, TimeLossKind::mse}) {
        FreLEConfig cfg;
        cfg.delta = delta;
        cfg.implicit_enabled = variant == 1;
        cfg.an_enabled = variant == 2;
        cfg.time_loss_kind = kind;
        CAPTURE(delta);
        CAPTURE(variant);
        check_gradient(cfg, 1000 + static_cast<std::uint64_t>(variant), 5);
      }
    }
  }
}

TEST_CASE("gradient handles pruning and reduces to the time term at delta=0") {
  FreLEConfig pruned;
  pruned.delta = 0.5;
  pruned.retention = 0.6;
  check_gradient(pruned, 77, 5);

  Rng rng(31);
  const Eigen::MatrixXd target = random_matrix(rng, 9, 2);
  const Eigen::MatrixXd pred = random_matrix(rng, 9, 2);
  FreLEConfig cfg;
  cfg.delta = 0.0;
  const Eigen::MatrixXd grad = frele_gradient(target, pred, cfg);
  const Eigen::MatrixXd expected =
      time_loss(target, pred, cfg.time_loss_kind).second;
  CHECK((grad - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gradient contribution vanishes where the spectra already agree") {
  Eigen::MatrixXd x(6, 1);
  x << 1, 2, 3, 2, 1, 0;
  FreLEConfig cfg;
  cfg.delta = 1.0;
  cfg.implicit_enabled = false;
  const Eigen::MatrixXd grad = frele_gradient(x, x, cfg);
  CHECK(grad.cwiseAbs().maxCoeff() == 0.0);
}
