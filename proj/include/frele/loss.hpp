#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "frele/spectral.hpp"

namespace frele {

enum class TimeLossKind { mae, mse };

/**
 * Knobs of the combined time/frequency loss.
 *
 * delta balances the frequency term against the time term. d is the window
 * width of the local-maximum scan and eta the dimensional balance divisor of
 * the rescale factor i/eta (defaulting to the bin count when unset). The
 * implicit rescale and the adaptive-normalization variant are mutually
 * exclusive. Low-amplitude bins can be pruned either by an absolute
 * threshold (epsilon_xi) or by a target surviving fraction (retention),
 * from which a per-spectrum threshold is derived.
 */
struct FreLEConfig {
  double delta = 0.3;
  int d = 5;
  std::optional<double> eta;
  bool implicit_enabled = true;
  bool an_enabled = false;
  std::optional<double> epsilon_xi;
  std::optional<double> retention;
  TimeLossKind time_loss_kind = TimeLossKind::mae;

  /** Throws InvalidInput if any field is outside its domain. */
  void validate() const;
};

struct LossBreakdown {
  double time_loss = 0.0;
  double freq_loss = 0.0;
  double combined = 0.0;
};

/**
 * Mean absolute (or squared) error over all entries, with its gradient with
 * respect to the prediction. The MAE subgradient is 0 at exact ties.
 */
std::pair<double, Eigen::MatrixXd> time_loss(const Eigen::MatrixXd& target,
                                             const Eigen::MatrixXd& pred,
                                             TimeLossKind kind);

/**
 * Indices i in [1, B) where A[i] equals the maximum of the window
 * A[i - floor(d/2)] .. A[i + ceil(d/2)], clamped to [0, B). The comparison
 * is non-strict; bin 0 competes as a neighbor but is never selected.
 */
std::vector<int> local_maxima(const Eigen::VectorXd& amplitude, int d);

/**
 * Copy of the spectrum with bins at the maxima indices multiplied by
 * index / eta. Throws InvalidIndex on an index outside [1, bin_count).
 */
Spectrum implicit_rescale(const Spectrum& spectrum,
                          std::span<const int> maxima, double eta);

/** Mean complex modulus |F[k] - Fhat[k]| over all spectra and bins. */
double freq_loss(std::span<const Spectrum> targets,
                 std::span<const Spectrum> preds);

/**
 * Copy with bins of modulus < epsilon_xi zeroed, plus the fraction of bins
 * that survived.
 */
std::pair<Spectrum, double> amplitude_filter(const Spectrum& spectrum,
                                             double epsilon_xi);

/**
 * Smallest threshold whose amplitude_filter keeps at most a `num` fraction
 * of bins. num in (0, 1]; num == 1 gives 0 (keep everything).
 */
double threshold_for_retention(const Spectrum& spectrum, double num);

/**
 * Combined loss over one horizon block (time-by-channels): time term on raw
 * values, frequency term on per-channel spectra after pruning and either
 * the local-maximum rescale or adaptive normalization, both driven by the
 * target spectrum and applied identically to target and prediction.
 */
LossBreakdown frele_loss(const Eigen::MatrixXd& target,
                         const Eigen::MatrixXd& pred, const FreLEConfig& cfg);

/**
 * Exact gradient of frele_loss(...).combined with respect to the
 * prediction. Maxima indices, pruning masks and normalization weights are
 * held fixed at their forward-pass values, and bins where the spectra
 * agree exactly contribute a zero subgradient.
 */
Eigen::MatrixXd frele_gradient(const Eigen::MatrixXd& target,
                               const Eigen::MatrixXd& pred,
                               const FreLEConfig& cfg);

}  // namespace frele
