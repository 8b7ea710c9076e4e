#include "frele/theory.hpp"

#include <cmath>
#include <numbers>

#include "frele/rng.hpp"

namespace frele {

namespace {

constexpr double kPi = std::numbers::pi;

void require_valid(double xi_norm, int dim, const InitSampler& sampler) {
  if (!(xi_norm > 0.0))
    throw InvalidFrequency("decay evaluators need xi_norm > 0");
  if (dim < 1) throw InvalidInput("dimension must be at least 1");
  if (sampler.count < 1) throw InvalidInput("sample count must be at least 1");
  if (sampler.mode == SamplerMode::point_mass && !(sampler.r0 > 0.0))
    throw InvalidInput("point-mass sampler needs r0 > 0");
}

}  // namespace

std::vector<InitSample> draw_samples(const InitSampler& sampler) {
  std::vector<InitSample> samples(static_cast<std::size_t>(sampler.count));
  if (sampler.mode == SamplerMode::point_mass) {
    for (auto& s : samples) s = {sampler.a0, sampler.b0, sampler.r0};
    return samples;
  }
  Rng rng(sampler.seed);
  for (auto& s : samples) {
    s.a = rng.normal();
    s.b = rng.normal();
    s.r = std::abs(rng.normal()) + 0.1;
  }
  return samples;
}

double csch_sq(double x) {
  const double numerator = 2.0 * std::exp(-x);
  const double denominator = 1.0 - std::exp(-2.0 * x);
  const double ratio = numerator / denominator;
  return ratio * ratio;
}

double gamma_relu_sq(double xi_norm, int dim, const InitSampler& sampler) {
  require_valid(xi_norm, dim, sampler);
  const bool absolute = sampler.mode == SamplerMode::gaussian_abs;
  const double cubic_denom =
      16.0 * std::pow(kPi, 4) * std::pow(xi_norm, dim + 3);
  const double linear_denom =
      4.0 * kPi * kPi * std::pow(xi_norm, dim + 1);
  double sum = 0.0;
  const auto samples = draw_samples(sampler);
  for (const auto& s : samples) {
    const double a = absolute ? std::abs(s.a) : s.a;
    sum += a * a * a / cubic_denom + s.b * s.b * a / linear_denom;
  }
  return sum / static_cast<double>(samples.size());
}

double gamma_tanh_sq(double xi_norm, int dim, const InitSampler& sampler) {
  require_valid(xi_norm, dim, sampler);
  const double envelope = 1.0 / std::pow(xi_norm, dim - 1);
  double sum = 0.0;
  const auto samples = draw_samples(sampler);
  for (const auto& s : samples) {
    const double decay = csch_sq(kPi * xi_norm / s.r);
    const double linear = kPi * kPi / s.r;
    const double quartic = 4.0 * std::pow(kPi, 4) * s.a * s.a * xi_norm *
                           xi_norm / (s.r * s.r * s.r);
    sum += envelope * (linear + quartic) * decay;
  }
  return sum / static_cast<double>(samples.size());
}

}  // namespace frele
