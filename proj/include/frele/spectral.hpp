#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "frele/errors.hpp"

namespace frele {

/**
 * One-sided spectrum of a real signal of length origin_length.
 *
 * bins holds floor(origin_length / 2) + 1 unnormalized coefficients
 * F[k] = sum_n x[n] exp(-2*pi*i*k*n/N). Bin 0 is the DC term and, for even
 * origin_length, the last bin is the Nyquist term; both have (numerically)
 * zero imaginary part for real input.
 */
struct Spectrum {
  Eigen::VectorXcd bins;
  int origin_length = 0;

  int bin_count() const { return static_cast<int>(bins.size()); }

  /** Throws InvalidSpectrum unless bin count matches origin_length. */
  void validate() const;
};

/** Expected one-sided bin count for a real signal of length n. */
inline int one_sided_bins(int n) { return n / 2 + 1; }

/**
 * Brute-force O(N^2) one-sided transform. Slow by design: serves as the
 * independent reference the fast path is checked against.
 */
Spectrum rdft_naive(const Eigen::VectorXd& x);

/** Fast one-sided transform; radix-2 for powers of two, Bluestein otherwise. */
Spectrum rfft(const Eigen::VectorXd& x);

/** Inverse of rfft: reconstructs the length-origin_length real signal. */
Eigen::VectorXd irfft(const Spectrum& spectrum);

/** Per-bin moduli |F[k]|. */
Eigen::VectorXd amplitudes(const Spectrum& spectrum);

/**
 * Contiguous three-way split of bin indices: low is [0, lf_end), mid is
 * [lf_end, mf_end), high is [mf_end, bin_count).
 */
struct BandPartition {
  int lf_end = 0;
  int mf_end = 0;
  int bin_count = 0;
};

/**
 * Partition with ceil(lf_frac * bins) low bins and mid extending to
 * ceil(mf_frac * bins). Requires bins >= 3 so every band is nonempty.
 */
BandPartition band_partition(int bins, double lf_frac = 0.1,
                             double mf_frac = 0.5);

/** Root-mean-square spectrum error per band plus the global figure. */
struct BandReport {
  double lf = 0.0;
  double mf = 0.0;
  double hf = 0.0;
  double gf = 0.0;
};

/**
 * RMSE of |F_target - F_pred| per band, pooled over all spectrum pairs and
 * bins in the band; gf pools every bin. All spectra must share bin count.
 */
BandReport band_rmse(std::span<const Spectrum> targets,
                     std::span<const Spectrum> preds,
                     const BandPartition& bands);

namespace detail {

/** In-place complex FFT of arbitrary length (unnormalized, forward). */
void fft(std::vector<std::complex<double>>& data);

/** In-place unnormalized inverse complex FFT (no 1/N factor applied). */
void ifft_unnormalized(std::vector<std::complex<double>>& data);

}  // namespace detail

}  // namespace frele
