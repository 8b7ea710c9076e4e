#include "frele/loss.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace frele {

namespace {

void require_same_shape(const Eigen::MatrixXd& target,
                        const Eigen::MatrixXd& pred, const char* where) {
  if (target.rows() != pred.rows() || target.cols() != pred.cols())
    throw ShapeMismatch(std::string(where) + ": target is " +
                        std::to_string(target.rows()) + "x" +
                        std::to_string(target.cols()) + ", prediction is " +
                        std::to_string(pred.rows()) + "x" +
                        std::to_string(pred.cols()));
}

/** Pruning threshold resolved from whichever knob is set. */
double resolve_threshold(const Spectrum& target, const FreLEConfig& cfg) {
  if (cfg.epsilon_xi) return *cfg.epsilon_xi;
  if (cfg.retention) return threshold_for_retention(target, *cfg.retention);
  return 0.0;
}

/**
 * Per-bin factor the loss applies to both spectra of one channel, derived
 * entirely from the target spectrum: pruning mask times either the
 * local-maximum rescale or the adaptive normalization.
 */
Eigen::VectorXd bin_weights(const Spectrum& target, const FreLEConfig& cfg) {
  const Eigen::VectorXd amp = amplitudes(target);
  const int b = target.bin_count();
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(b);
  const double threshold = resolve_threshold(target, cfg);
  if (threshold > 0.0)
    for (int k = 0; k < b; ++k)
      if (amp[k] < threshold) weights[k] = 0.0;
  if (cfg.an_enabled) {
    weights.array() /= amp.array() + 1e-8;
  } else if (cfg.implicit_enabled) {
    const double eta = cfg.eta.value_or(static_cast<double>(b));
    for (int i : local_maxima(amp, cfg.d)) weights[i] *= i / eta;
  }
  return weights;
}

}  // namespace

void FreLEConfig::validate() const {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw InvalidInput("delta must lie in [0, 1]");
  if (d < 1) throw InvalidInput("frequency width d must be at least 1");
  if (eta && !(*eta > 0.0)) throw InvalidInput("eta must be positive");
  if (implicit_enabled && an_enabled)
    throw InvalidInput(
        "implicit rescale and adaptive normalization are mutually exclusive");
  if (epsilon_xi && !(*epsilon_xi >= 0.0))
    throw InvalidInput("epsilon_xi must be non-negative");
  if (retention && !(*retention > 0.0 && *retention <= 1.0))
    throw InvalidInput("retention must lie in (0, 1]");
  if (epsilon_xi && retention)
    throw InvalidInput("set epsilon_xi or retention, not both");
}

std::pair<double, Eigen::MatrixXd> time_loss(const Eigen::MatrixXd& target,
                                             const Eigen::MatrixXd& pred,
                                             TimeLossKind kind) {
  require_same_shape(target, pred, "time_loss");
  const auto count = static_cast<double>(target.size());
  const Eigen::MatrixXd diff = pred - target;
  if (kind == TimeLossKind::mse)
    return {diff.squaredNorm() / count, 2.0 * diff / count};
  const double loss = diff.cwiseAbs().sum() / count;
  const Eigen::MatrixXd grad =
      diff.unaryExpr([](double v) {
        return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
      }) /
      count;
  return {loss, grad};
}

std::vector<int> local_maxima(const Eigen::VectorXd& amplitude, int d) {
  if (d < 1) throw InvalidInput("local_maxima: window width must be >= 1");
  const auto b = static_cast<int>(amplitude.size());
  const int left = d / 2;
  const int right = (d + 1) / 2;
  std::vector<int> maxima;
  for (int i = 1; i < b; ++i) {
    const int lo = std::max(0, i - left);
    const int hi = std::min(b - 1, i + right);
    bool is_max = true;
    for (int j = lo; j <= hi && is_max; ++j)
      is_max = amplitude[i] >= amplitude[j];
    if (is_max) maxima.push_back(i);
  }
  return maxima;
}

Spectrum implicit_rescale(const Spectrum& spectrum,
                          std::span<const int> maxima, double eta) {
  if (!(eta > 0.0)) throw InvalidInput("implicit_rescale: eta must be positive");
  Spectrum out = spectrum;
  for (int i : maxima) {
    if (i < 1 || i >= spectrum.bin_count())
      throw InvalidIndex("implicit_rescale: maximum index " +
                         std::to_string(i) + " outside [1, " +
                         std::to_string(spectrum.bin_count()) + ")");
    out.bins[i] *= static_cast<double>(i) / eta;
  }
  return out;
}

double freq_loss(std::span<const Spectrum> targets,
                 std::span<const Spectrum> preds) {
  if (targets.size() != preds.size())
    throw ShapeMismatch("freq_loss: " + std::to_string(targets.size()) +
                        " targets vs " + std::to_string(preds.size()) +
                        " predictions");
  if (targets.empty()) throw NoData("freq_loss: no spectra given");
  double sum = 0.0;
  long bins = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].bin_count() != preds[i].bin_count())
      throw ShapeMismatch("freq_loss: spectrum " + std::to_string(i) +
                          " bin counts differ");
    sum += (targets[i].bins - preds[i].bins).cwiseAbs().sum();
    bins += targets[i].bin_count();
  }
  return sum / static_cast<double>(bins);
}

std::pair<Spectrum, double> amplitude_filter(const Spectrum& spectrum,
                                             double epsilon_xi) {
  if (!(epsilon_xi >= 0.0))
    throw InvalidInput("amplitude_filter: epsilon_xi must be non-negative");
  Spectrum out = spectrum;
  int kept = 0;
  for (int k = 0; k < out.bin_count(); ++k) {
    if (std::abs(out.bins[k]) < epsilon_xi)
      out.bins[k] = 0.0;
    else
      ++kept;
  }
  return {out, static_cast<double>(kept) / out.bin_count()};
}

double threshold_for_retention(const Spectrum& spectrum, double num) {
  if (!(num > 0.0 && num <= 1.0))
    throw InvalidInput("threshold_for_retention: num must lie in (0, 1]");
  const int b = spectrum.bin_count();
  if (b < 1) throw TooFewBins("threshold_for_retention: empty spectrum");
  const int allowed = static_cast<int>(std::floor(num * b));
  const int to_zero = b - allowed;
  if (to_zero <= 0) return 0.0;
  std::vector<double> amp(static_cast<std::size_t>(b));
  for (int k = 0; k < b; ++k) amp[static_cast<std::size_t>(k)] = std::abs(spectrum.bins[k]);
  std::sort(amp.begin(), amp.end());
  return std::nextafter(amp[static_cast<std::size_t>(to_zero - 1)],
                        std::numeric_limits<double>::infinity());
}

LossBreakdown frele_loss(const Eigen::MatrixXd& target,
                         const Eigen::MatrixXd& pred, const FreLEConfig& cfg) {
  cfg.validate();
  require_same_shape(target, pred, "frele_loss");
  LossBreakdown out;
  out.time_loss = time_loss(target, pred, cfg.time_loss_kind).first;
  const auto channels = static_cast<int>(target.cols());
  double freq_sum = 0.0;
  long bins = 0;
  for (int c = 0; c < channels; ++c) {
    const Spectrum f_target = rfft(target.col(c));
    const Spectrum f_pred = rfft(pred.col(c));
    const Eigen::VectorXd weights = bin_weights(f_target, cfg);
    freq_sum +=
        (weights.array() * (f_target.bins - f_pred.bins).cwiseAbs().array())
            .sum();
    bins += f_target.bin_count();
  }
  out.freq_loss = freq_sum / static_cast<double>(bins);
  out.combined = cfg.delta * out.freq_loss + (1.0 - cfg.delta) * out.time_loss;
  return out;
}

Eigen::MatrixXd frele_gradient(const Eigen::MatrixXd& target,
                               const Eigen::MatrixXd& pred,
                               const FreLEConfig& cfg) {
  cfg.validate();
  require_same_shape(target, pred, "frele_gradient");
  Eigen::MatrixXd grad =
      (1.0 - cfg.delta) * time_loss(target, pred, cfg.time_loss_kind).second;
  if (cfg.delta == 0.0) return grad;

  // The frequency term per channel is sum_k w_k |F_k - Fhat_k| / (B*C) with
  // w_k fixed by the target, so its derivative with respect to sample n is
  // -Re(sum_k w_k P_k exp(+2*pi*i*k*n/S)) / (B*C), P_k the unit phase of
  // F_k - Fhat_k. The k-sum over one-sided bins is evaluated by an
  // unnormalized inverse FFT of the zero-padded weighted phases.
  const auto horizon = static_cast<int>(target.rows());
  const auto channels = static_cast<int>(target.cols());
  const int b = one_sided_bins(horizon);
  const double scale = cfg.delta / (static_cast<double>(b) * channels);
  for (int c = 0; c < channels; ++c) {
    const Spectrum f_target = rfft(target.col(c));
    const Spectrum f_pred = rfft(pred.col(c));
    const Eigen::VectorXd weights = bin_weights(f_target, cfg);
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(horizon));
    for (int k = 0; k < b; ++k) {
      const std::complex<double> diff = f_target.bins[k] - f_pred.bins[k];
      const double modulus = std::abs(diff);
      if (modulus > 0.0)
        buf[static_cast<std::size_t>(k)] = weights[k] * diff / modulus;
    }
    detail::ifft_unnormalized(buf);
    for (int n = 0; n < horizon; ++n)
      grad(n, c) -= scale * buf[static_cast<std::size_t>(n)].real();
  }
  return grad;
}

}  // namespace frele
