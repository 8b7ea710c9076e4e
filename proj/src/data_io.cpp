#include "frele/data_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "frele/errors.hpp"
#include "frele/rng.hpp"

namespace frele {

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  return out;
}

double parse_cell(const std::string& cell, long line_number) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw ParseError("line " + std::to_string(line_number) +
                     ": not a number: '" + cell + "'");
  if (!std::isfinite(value))
    throw ParseError("line " + std::to_string(line_number) +
                     ": non-finite value: '" + cell + "'");
  return value;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

MultiSeries gen_sine_sum(const SineSumSpec& spec) {
  if (spec.n_points < 1) throw InvalidInput("n_points must be positive");
  if (spec.coefficients.size() != spec.angular_frequencies.size())
    throw InvalidInput("coefficients and angular_frequencies differ in size");
  if (spec.coefficients.empty())
    throw InvalidInput("at least one component required");
  if (spec.dx <= 0.0) throw InvalidInput("dx must be positive");
  if (spec.noise_std < 0.0) throw InvalidInput("noise_std must be >= 0");

  MultiSeries series;
  series.values.resize(1, spec.n_points);
  series.channel_names = {"signal"};
  Rng rng(spec.seed);
  for (int n = 0; n < spec.n_points; ++n) {
    double y = 0.0;
    for (std::size_t j = 0; j < spec.coefficients.size(); ++j)
      y += spec.coefficients[j] *
           std::sin(spec.angular_frequencies[j] * n * spec.dx);
    if (spec.noise_std > 0.0) y += spec.noise_std * rng.normal();
    series.values(0, n) = y;
  }
  return series;
}

MultiSeries load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open for reading: " + path);

  std::string line;
  if (!std::getline(in, line)) throw NoData("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_row(line);
  if (header.size() < 2)
    throw ParseError("line 1: need a timestamp column and at least one channel");

  MultiSeries series;
  const std::size_t channels = header.size() - 1;
  series.channel_names.assign(header.begin() + 1, header.end());

  std::vector<std::vector<double>> columns(channels);
  long line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != header.size())
      throw ParseError("line " + std::to_string(line_number) + ": expected " +
                       std::to_string(header.size()) + " cells, got " +
                       std::to_string(cells.size()));
    series.timestamps.push_back(cells[0]);
    for (std::size_t c = 0; c < channels; ++c)
      columns[c].push_back(parse_cell(cells[c + 1], line_number));
  }
  if (columns[0].empty()) throw NoData("no data rows in " + path);

  series.values.resize(static_cast<long>(channels),
                       static_cast<long>(columns[0].size()));
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t t = 0; t < columns[c].size(); ++t)
      series.values(static_cast<long>(c), static_cast<long>(t)) =
          columns[c][t];
  series.validate();
  return series;
}

std::string format_g17(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void save_csv(const std::string& path, const MultiSeries& series) {
  series.validate();
  auto out = open_for_write(path);
  out << "timestamp";
  for (long c = 0; c < series.channels(); ++c) {
    out << ',';
    if (c < static_cast<long>(series.channel_names.size()))
      out << series.channel_names[static_cast<std::size_t>(c)];
    else
      out << "ch" << c;
  }
  out << '\n';
  const bool has_stamps =
      static_cast<long>(series.timestamps.size()) == series.length();
  for (long t = 0; t < series.length(); ++t) {
    if (has_stamps)
      out << series.timestamps[static_cast<std::size_t>(t)];
    else
      out << t;
    for (long c = 0; c < series.channels(); ++c)
      out << ',' << format_g17(series.values(c, t));
    out << '\n';
  }
}

void write_band_report_csv(const std::string& path, const BandReport& report) {
  auto out = open_for_write(path);
  out << "lf,mf,hf,gf\n";
  out << format_g17(report.lf) << ',' << format_g17(report.mf) << ','
      << format_g17(report.hf) << ',' << format_g17(report.gf) << '\n';
}

void write_table_report_csv(const std::string& path, const BandReport& report,
                            const Metrics& metrics) {
  auto out = open_for_write(path);
  out << "lf,mf,hf,gf,mae,mse\n";
  out << format_g17(report.lf) << ',' << format_g17(report.mf) << ','
      << format_g17(report.hf) << ',' << format_g17(report.gf) << ','
      << format_g17(metrics.mae) << ',' << format_g17(metrics.mse) << '\n';
}

void write_bias_profile_csv(const std::string& path,
                            const BiasProfile& profile) {
  if (profile.bands.size() != profile.metrics.size())
    throw ShapeMismatch("bias profile bands and metrics differ in length");
  auto out = open_for_write(path);
  out << "epoch,lf,mf,hf,gf,mse,mae\n";
  for (std::size_t e = 0; e < profile.bands.size(); ++e) {
    const auto& b = profile.bands[e];
    const auto& m = profile.metrics[e];
    out << e << ',' << format_g17(b.lf) << ',' << format_g17(b.mf) << ','
        << format_g17(b.hf) << ',' << format_g17(b.gf) << ','
        << format_g17(m.mse) << ',' << format_g17(m.mae) << '\n';
  }
}

void write_trajectory_csv(const std::string& path,
                          const FrequencyTrajectory& trajectory) {
  auto out = open_for_write(path);
  out << "iteration,freq,rel_error\n";
  for (long i = 0; i < static_cast<long>(trajectory.iterations.size()); ++i)
    for (long f = 0; f < static_cast<long>(trajectory.freqs.size()); ++f)
      out << trajectory.iterations[static_cast<std::size_t>(i)] << ','
          << format_g17(trajectory.freqs[static_cast<std::size_t>(f)]) << ','
          << format_g17(trajectory.rel_error(i, f)) << '\n';
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep) {
  auto out = open_for_write(path);
  out << "grid_value,mse,mae,time_loss,freq_loss\n";
  for (const auto& p : sweep.points)
    out << format_g17(p.grid_value) << ',' << format_g17(p.metrics.mse) << ','
        << format_g17(p.metrics.mae) << ',' << format_g17(p.time_loss) << ','
        << format_g17(p.freq_loss) << '\n';
}

void write_ablation_csv(const std::string& path,
                        std::span<const AblationRow> rows) {
  auto out = open_for_write(path);
  out << "setting,mse,mae\n";
  for (const auto& row : rows)
    out << row.setting << ',' << format_g17(row.metrics.mse) << ','
        << format_g17(row.metrics.mae) << '\n';
}

void write_decay_curves_csv(const std::string& path,
                            std::span<const double> xi_norms,
                            std::span<const double> relu_values,
                            std::span<const double> tanh_values) {
  if (xi_norms.size() != relu_values.size() ||
      xi_norms.size() != tanh_values.size())
    throw ShapeMismatch("decay curve columns differ in length");
  auto out = open_for_write(path);
  out << "xi_norm,gamma_relu_sq,gamma_tanh_sq\n";
  for (std::size_t i = 0; i < xi_norms.size(); ++i)
    out << format_g17(xi_norms[i]) << ',' << format_g17(relu_values[i]) << ','
        << format_g17(tanh_values[i]) << '\n';
}

void write_epochs_csv(const std::string& path,
                      std::span<const EpochLog> logs) {
  auto out = open_for_write(path);
  out << "epoch,train_time,train_freq,train_combined,"
         "val_time,val_freq,val_combined\n";
  for (const auto& log : logs)
    out << log.epoch << ',' << format_g17(log.train_loss.time_loss) << ','
        << format_g17(log.train_loss.freq_loss) << ','
        << format_g17(log.train_loss.combined) << ','
        << format_g17(log.val_loss.time_loss) << ','
        << format_g17(log.val_loss.freq_loss) << ','
        << format_g17(log.val_loss.combined) << '\n';
}

void write_manifest(const std::string& path, const nlohmann::json& manifest) {
  auto out = open_for_write(path);
  out << manifest.dump(2) << '\n';
}

nlohmann::json load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open for reading: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace frele
