#pragma once

#include <cstdint>
#include <vector>

#include "frele/errors.hpp"

namespace frele {

enum class SamplerMode {
  /** Fixed a = a0, b = b0, r = r0; the default for plotting curves. */
  point_mass,
  /** a, b standard normal; r = |standard normal| + 0.1. */
  gaussian,
  /** Like gaussian, but odd powers of a enter as |a| so terms cannot cancel. */
  gaussian_abs,
};

/**
 * Distribution of the initialization constants a, b, r entering the decay
 * integrands. The same seed always yields the same sample set, so curves
 * evaluated over a frequency grid share common random numbers.
 */
struct InitSampler {
  SamplerMode mode = SamplerMode::point_mass;
  double a0 = 1.0;
  double b0 = 1.0;
  double r0 = 1.0;
  std::uint64_t seed = 0;
  int count = 1;
};

/** One draw of the initialization constants. */
struct InitSample {
  double a = 0.0;
  double b = 0.0;
  double r = 0.0;
};

/** Materializes the sampler's n draws (deterministic in the seed). */
std::vector<InitSample> draw_samples(const InitSampler& sampler);

/**
 * Monte Carlo mean of the relu-network decay integrand
 * a^3 / (16 pi^4 ||xi||^(d+3)) + b^2 a / (4 pi^2 ||xi||^(d+1)).
 * In gaussian_abs mode the odd factors use |a|.
 */
double gamma_relu_sq(double xi_norm, int dim, const InitSampler& sampler);

/**
 * Monte Carlo mean of the tanh-network decay integrand
 * (pi^2/r + 4 pi^4 a^2 ||xi||^2 / r^3) * csch^2(pi ||xi|| / r),
 * all divided by ||xi||^(d-1). csch underflows to 0 for large arguments
 * rather than producing NaN or Inf.
 */
double gamma_tanh_sq(double xi_norm, int dim, const InitSampler& sampler);

/** Numerically stable csch^2(x) = (2 e^{-x} / (1 - e^{-2x}))^2, x > 0. */
double csch_sq(double x);

}  // namespace frele
