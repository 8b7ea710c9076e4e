#include "frele/spectral.hpp"

#include <cmath>
#include <numbers>

namespace frele {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/** Iterative radix-2 FFT with a precomputed twiddle table. */
void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<std::complex<double>> root(n / 2);
  for (std::size_t j = 0; j < n / 2; ++j) {
    const double ang = -kTau * static_cast<double>(j) / static_cast<double>(n);
    root[j] = {std::cos(ang), std::sin(ang)};
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const auto u = a[start + j];
        const auto v = a[start + j + len / 2] * root[j * stride];
        a[start + j] = u + v;
        a[start + j + len / 2] = u - v;
      }
    }
  }
}

/**
 * Bluestein's algorithm: rewrites the length-n transform as a convolution
 * with a chirp, carried out by a padded radix-2 FFT. The chirp exponent is
 * reduced mod 2n to keep angles small before the trig evaluation.
 */
void fft_bluestein(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  std::vector<std::complex<double>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto reduced = static_cast<unsigned long long>(k) * k % (2 * n);
    const double ang =
        -std::numbers::pi * static_cast<double>(reduced) / static_cast<double>(n);
    chirp[k] = {std::cos(ang), std::sin(ang)};
  }
  const std::size_t m = next_power_of_two(2 * n - 1);
  std::vector<std::complex<double>> u(m), v(m);
  for (std::size_t k = 0; k < n; ++k) u[k] = a[k] * chirp[k];
  v[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    v[k] = std::conj(chirp[k]);
    v[m - k] = v[k];
  }
  fft_radix2(u);
  fft_radix2(v);
  for (std::size_t k = 0; k < m; ++k) u[k] *= v[k];
  for (auto& value : u) value = std::conj(value);
  fft_radix2(u);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k)
    a[k] = std::conj(u[k]) * scale * chirp[k];
}

}  // namespace

namespace detail {

void fft(std::vector<std::complex<double>>& data) {
  if (data.size() <= 1) return;
  if (is_power_of_two(data.size())) {
    fft_radix2(data);
  } else {
    fft_bluestein(data);
  }
}

void ifft_unnormalized(std::vector<std::complex<double>>& data) {
  for (auto& value : data) value = std::conj(value);
  fft(data);
  for (auto& value : data) value = std::conj(value);
}

}  // namespace detail

void Spectrum::validate() const {
  if (origin_length < 1)
    throw InvalidSpectrum("spectrum origin_length must be at least 1");
  if (bin_count() != one_sided_bins(origin_length))
    throw InvalidSpectrum("spectrum has " + std::to_string(bin_count()) +
                          " bins but origin_length " +
                          std::to_string(origin_length) + " implies " +
                          std::to_string(one_sided_bins(origin_length)));
}

Spectrum rdft_naive(const Eigen::VectorXd& x) {
  const auto n = static_cast<int>(x.size());
  if (n < 1) throw InvalidInput("rdft_naive: input signal is empty");
  Spectrum out;
  out.origin_length = n;
  out.bins.resize(one_sided_bins(n));
  for (int k = 0; k < out.bin_count(); ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (int t = 0; t < n; ++t) {
      const double ang = -kTau * static_cast<double>(k) * t / n;
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out.bins[k] = acc;
  }
  return out;
}

Spectrum rfft(const Eigen::VectorXd& x) {
  const auto n = static_cast<int>(x.size());
  if (n < 1) throw InvalidInput("rfft: input signal is empty");
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) buf[static_cast<std::size_t>(t)] = {x[t], 0.0};
  detail::fft(buf);
  Spectrum out;
  out.origin_length = n;
  out.bins.resize(one_sided_bins(n));
  for (int k = 0; k < out.bin_count(); ++k)
    out.bins[k] = buf[static_cast<std::size_t>(k)];
  return out;
}

Eigen::VectorXd irfft(const Spectrum& spectrum) {
  spectrum.validate();
  const int n = spectrum.origin_length;
  const int b = spectrum.bin_count();
  const double tolerance = 1e-9 * (1.0 + spectrum.bins.cwiseAbs().maxCoeff());
  if (std::abs(spectrum.bins[0].imag()) > tolerance)
    throw InvalidSpectrum("irfft: DC bin has nonzero imaginary part");
  if (n % 2 == 0 && std::abs(spectrum.bins[b - 1].imag()) > tolerance)
    throw InvalidSpectrum("irfft: Nyquist bin has nonzero imaginary part");
  std::vector<std::complex<double>> full(static_cast<std::size_t>(n));
  for (int k = 0; k < b; ++k) full[static_cast<std::size_t>(k)] = spectrum.bins[k];
  for (int k = b; k < n; ++k)
    full[static_cast<std::size_t>(k)] = std::conj(spectrum.bins[n - k]);
  detail::ifft_unnormalized(full);
  Eigen::VectorXd out(n);
  for (int t = 0; t < n; ++t)
    out[t] = full[static_cast<std::size_t>(t)].real() / n;
  return out;
}

Eigen::VectorXd amplitudes(const Spectrum& spectrum) {
  return spectrum.bins.cwiseAbs();
}

BandPartition band_partition(int bins, double lf_frac, double mf_frac) {
  if (!(lf_frac > 0.0 && lf_frac < mf_frac && mf_frac < 1.0))
    throw InvalidInput("band_partition: need 0 < lf_frac < mf_frac < 1");
  if (bins < 3)
    throw TooFewBins("band_partition: need at least 3 bins, got " +
                     std::to_string(bins));
  BandPartition p;
  p.bin_count = bins;
  p.lf_end = static_cast<int>(std::ceil(lf_frac * bins));
  p.mf_end = static_cast<int>(std::ceil(mf_frac * bins));
  if (p.lf_end < 1 || p.mf_end <= p.lf_end || p.mf_end >= bins)
    throw TooFewBins("band_partition: " + std::to_string(bins) +
                     " bins leave an empty band at the given fractions");
  return p;
}

BandReport band_rmse(std::span<const Spectrum> targets,
                     std::span<const Spectrum> preds,
                     const BandPartition& bands) {
  if (targets.empty()) throw NoData("band_rmse: no spectra given");
  if (targets.size() != preds.size())
    throw ShapeMismatch("band_rmse: " + std::to_string(targets.size()) +
                        " targets vs " + std::to_string(preds.size()) +
                        " predictions");
  double sums[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].bin_count() != bands.bin_count ||
        preds[i].bin_count() != bands.bin_count)
      throw ShapeMismatch("band_rmse: spectrum " + std::to_string(i) +
                          " does not match the partition bin count");
    for (int k = 0; k < bands.bin_count; ++k) {
      const int band = k < bands.lf_end ? 0 : (k < bands.mf_end ? 1 : 2);
      sums[band] += std::norm(targets[i].bins[k] - preds[i].bins[k]);
    }
  }
  const auto pairs = static_cast<double>(targets.size());
  const double counts[3] = {pairs * bands.lf_end,
                            pairs * (bands.mf_end - bands.lf_end),
                            pairs * (bands.bin_count - bands.mf_end)};
  BandReport report;
  report.lf = std::sqrt(sums[0] / counts[0]);
  report.mf = std::sqrt(sums[1] / counts[1]);
  report.hf = std::sqrt(sums[2] / counts[2]);
  report.gf = std::sqrt((sums[0] + sums[1] + sums[2]) /
                        (counts[0] + counts[1] + counts[2]));
  return report;
}

}  // namespace frele
