#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "frele/diagnostics.hpp"
#include "frele/timeseries.hpp"
#include "frele/trainer.hpp"

namespace frele {

/**
 * y[n] = sum_j coefficients[j] * sin(angular_frequencies[j] * n * dx), plus
 * optional gaussian noise. With the default dx = 2*pi/64, angular frequency
 * 1 completes one cycle every 64 samples, so frequencies 1, 2, 3 land on
 * integer spectrum bins whenever n_points is a multiple of 64.
 */
struct SineSumSpec {
  std::vector<double> coefficients{1.0, 1.0, 1.0};
  std::vector<double> angular_frequencies{1.0, 2.0, 3.0};
  int n_points = 512;
  double dx = 2.0 * 3.14159265358979323846 / 64.0;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
};

/** Single-channel sine mixture; deterministic when noise_std is 0. */
MultiSeries gen_sine_sum(const SineSumSpec& spec);

/**
 * Reads a header-plus-rows CSV whose first column is a timestamp or index
 * and whose remaining columns are numeric channels. NaN/Inf cells and
 * malformed rows raise ParseError with the offending line number.
 */
MultiSeries load_csv(const std::string& path);

/** Writes the series in the same layout at 17 significant digits. */
void save_csv(const std::string& path, const MultiSeries& series);

/** Doubles formatted with %.17g so values round-trip losslessly. */
std::string format_g17(double value);

void write_band_report_csv(const std::string& path, const BandReport& report);
void write_table_report_csv(const std::string& path, const BandReport& report,
                            const Metrics& metrics);
void write_bias_profile_csv(const std::string& path,
                            const BiasProfile& profile);
void write_trajectory_csv(const std::string& path,
                          const FrequencyTrajectory& trajectory);
void write_sweep_csv(const std::string& path, const SweepResult& sweep);
void write_ablation_csv(const std::string& path,
                        std::span<const AblationRow> rows);
void write_decay_curves_csv(const std::string& path,
                            std::span<const double> xi_norms,
                            std::span<const double> relu_values,
                            std::span<const double> tanh_values);
/** Per-epoch losses; wall time is deliberately omitted so reruns match. */
void write_epochs_csv(const std::string& path,
                      std::span<const EpochLog> logs);

/** Pretty-printed JSON (sorted keys); re-serialization is byte-stable. */
void write_manifest(const std::string& path, const nlohmann::json& manifest);
nlohmann::json load_manifest(const std::string& path);

}  // namespace frele
