#include "frele/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "frele/diagnostics.hpp"
#include "frele/errors.hpp"
#include "frele/models.hpp"
#include "frele/rng.hpp"
#include "frele/spectral.hpp"
#include "frele/theory.hpp"

namespace frele {

namespace {

double parse_number(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw InvalidInput("not a number: '" + text + "'");
  return value;
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string compact_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
  return buf;
}

std::filesystem::path resolve_out_dir(const RunConfig& cfg) {
  std::filesystem::path dir = cfg.out_dir.empty()
                                  ? std::filesystem::path("runs") /
                                        (compact_timestamp() + "-" +
                                         std::to_string(cfg.train.seed))
                                  : std::filesystem::path(cfg.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

LinearMode model_mode(const std::string& name) {
  if (name == "dlinear") return LinearMode::decomposed;
  if (name == "plain") return LinearMode::plain;
  throw InvalidInput("model must be dlinear or plain, got '" + name + "'");
}

TimeLossKind time_loss_kind(const std::string& name) {
  if (name == "mae") return TimeLossKind::mae;
  if (name == "mse") return TimeLossKind::mse;
  throw InvalidInput("time-loss must be mae or mse, got '" + name + "'");
}

ActivationKind activation_kind(const RunConfig& cfg) {
  if (cfg.act == "tanh") return {Activation::tanh, cfg.ricker_a};
  if (cfg.act == "relu") return {Activation::relu, cfg.ricker_a};
  if (cfg.act == "ricker") return {Activation::ricker, cfg.ricker_a};
  throw InvalidInput("act must be tanh, relu or ricker, got '" + cfg.act +
                     "'");
}

SamplerMode sampler_mode(const std::string& name) {
  if (name == "point_mass") return SamplerMode::point_mass;
  if (name == "gaussian") return SamplerMode::gaussian;
  if (name == "gaussian_abs") return SamplerMode::gaussian_abs;
  throw InvalidInput("sampler must be point_mass, gaussian or gaussian_abs");
}

FreLEConfig loss_config(const RunConfig& cfg) {
  FreLEConfig loss = cfg.loss;
  loss.time_loss_kind = time_loss_kind(cfg.time_loss);
  loss.validate();
  return loss;
}

struct Prepared {
  std::vector<WindowPair> train;
  std::vector<WindowPair> val;
  std::vector<WindowPair> test;
  int channels = 1;
  long series_length = 0;
  std::string source;
  std::string split;
};

Prepared prepare_windows(const RunConfig& cfg) {
  MultiSeries series;
  Prepared prepared;
  if (cfg.data_path.empty()) {
    SineSumSpec synth = cfg.synth;
    synth.seed = cfg.train.seed;
    series = gen_sine_sum(synth);
    prepared.source = "synthetic";
  } else {
    series = load_csv(cfg.data_path);
    prepared.source = cfg.data_path;
  }

  SplitSpec split;
  if (cfg.split_mode == "preset") {
    split.mode = SplitMode::ett_preset;
  } else if (cfg.split_mode == "fractional") {
    split.mode = SplitMode::fractional;
  } else if (cfg.split_mode == "auto") {
    split.mode = series.length() >= 14400 ? SplitMode::ett_preset
                                          : SplitMode::fractional;
  } else {
    throw InvalidInput("split must be auto, preset or fractional, got '" +
                       cfg.split_mode + "'");
  }
  prepared.split =
      split.mode == SplitMode::ett_preset ? "preset" : "fractional";

  const Splits splits = time_split(series, split);
  const Scaler scaler = fit_scaler(splits.train);
  prepared.channels = series.channels();
  prepared.series_length = series.length();
  prepared.train = make_windows(apply_scaler(scaler, splits.train),
                                cfg.lookback, cfg.horizon);
  prepared.val =
      make_windows(apply_scaler(scaler, splits.val), cfg.lookback, cfg.horizon);
  prepared.test = make_windows(apply_scaler(scaler, splits.test), cfg.lookback,
                               cfg.horizon);
  return prepared;
}

ExperimentPlan make_experiment_plan(const RunConfig& cfg,
                                    const Prepared& prepared) {
  ExperimentPlan plan;
  plan.train = prepared.train;
  plan.val = prepared.val;
  plan.test = prepared.test;
  plan.mode = model_mode(cfg.model);
  plan.channel_shared = !cfg.individual;
  plan.channels = prepared.channels;
  plan.ma_kernel = cfg.kernel;
  plan.lookback = cfg.lookback;
  plan.horizon = cfg.horizon;
  plan.loss_cfg = loss_config(cfg);
  plan.train_cfg = cfg.train;
  plan.train_cfg.validate();
  return plan;
}

nlohmann::json config_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["seed"] = cfg.train.seed;
  j["epochs"] = cfg.train.epochs;
  j["batch"] = cfg.train.batch_size;
  j["lr"] = cfg.train.lr;
  j["patience"] = cfg.train.patience;
  j["delta"] = cfg.loss.delta;
  j["d"] = cfg.loss.d;
  j["eta"] = cfg.loss.eta ? nlohmann::json(*cfg.loss.eta) : nlohmann::json("B");
  j["implicit"] = cfg.loss.implicit_enabled;
  j["an"] = cfg.loss.an_enabled;
  j["epsilon-xi"] = cfg.loss.epsilon_xi ? nlohmann::json(*cfg.loss.epsilon_xi)
                                        : nlohmann::json();
  j["retention"] =
      cfg.loss.retention ? nlohmann::json(*cfg.loss.retention) : nlohmann::json();
  j["time-loss"] = cfg.time_loss;
  j["split"] = cfg.split_mode;
  j["model"] = cfg.model;
  j["individual"] = cfg.individual;
  j["kernel"] = cfg.kernel;
  j["data"] = cfg.data_path;
  j["lookback"] = cfg.lookback;
  j["horizon"] = cfg.horizon;
  j["grid"] = cfg.grid;
  j["points"] = cfg.synth.n_points;
  j["dx"] = cfg.synth.dx;
  j["noise"] = cfg.synth.noise_std;
  j["coeffs"] = cfg.synth.coefficients;
  j["freqs"] = cfg.synth.angular_frequencies;
  j["width"] = cfg.width;
  j["iters"] = cfg.iterations;
  j["snapshot-every"] = cfg.snapshot_every;
  j["pointwise-lr"] = cfg.pointwise_lr;
  j["act"] = cfg.act;
  j["ricker-a"] = cfg.ricker_a;
  j["sampler"] = cfg.sampler;
  j["dim"] = cfg.dim;
  j["samples"] = cfg.samples;
  j["a0"] = cfg.a0;
  j["b0"] = cfg.b0;
  j["r0"] = cfg.r0;
  j["xi-min"] = cfg.xi_min;
  j["xi-max"] = cfg.xi_max;
  j["xi-points"] = cfg.xi_points;
  return j;
}

nlohmann::json base_manifest(const std::string& command, const RunConfig& cfg,
                             const std::filesystem::path& out) {
  nlohmann::json manifest;
  manifest["command"] = command;
  manifest["created"] = iso_timestamp();
  manifest["out"] = out.string();
  manifest["config"] = config_json(cfg);
  return manifest;
}

void apply_config_file(RunConfig& cfg, const nlohmann::json& j) {
  for (const auto& [key, value] : j.items()) {
    if (key == "seed") cfg.train.seed = value.get<std::uint64_t>();
    else if (key == "epochs") cfg.train.epochs = value.get<int>();
    else if (key == "batch") cfg.train.batch_size = value.get<int>();
    else if (key == "lr") cfg.train.lr = value.get<double>();
    else if (key == "patience") cfg.train.patience = value.get<int>();
    else if (key == "delta") cfg.loss.delta = value.get<double>();
    else if (key == "d") cfg.loss.d = value.get<int>();
    else if (key == "eta") cfg.loss.eta = value.get<double>();
    else if (key == "implicit") cfg.loss.implicit_enabled = value.get<bool>();
    else if (key == "an") cfg.loss.an_enabled = value.get<bool>();
    else if (key == "epsilon-xi") cfg.loss.epsilon_xi = value.get<double>();
    else if (key == "retention") cfg.loss.retention = value.get<double>();
    else if (key == "time-loss") cfg.time_loss = value.get<std::string>();
    else if (key == "split") cfg.split_mode = value.get<std::string>();
    else if (key == "model") cfg.model = value.get<std::string>();
    else if (key == "individual") cfg.individual = value.get<bool>();
    else if (key == "kernel") cfg.kernel = value.get<int>();
    else if (key == "data") cfg.data_path = value.get<std::string>();
    else if (key == "lookback") cfg.lookback = value.get<int>();
    else if (key == "horizon") cfg.horizon = value.get<int>();
    else if (key == "out") cfg.out_dir = value.get<std::string>();
    else if (key == "grid") cfg.grid = value.get<std::string>();
    else if (key == "points") cfg.synth.n_points = value.get<int>();
    else if (key == "dx") cfg.synth.dx = value.get<double>();
    else if (key == "noise") cfg.synth.noise_std = value.get<double>();
    else if (key == "coeffs")
      cfg.synth.coefficients = value.get<std::vector<double>>();
    else if (key == "freqs")
      cfg.synth.angular_frequencies = value.get<std::vector<double>>();
    else if (key == "width") cfg.width = value.get<int>();
    else if (key == "iters") cfg.iterations = value.get<int>();
    else if (key == "snapshot-every") cfg.snapshot_every = value.get<int>();
    else if (key == "pointwise-lr") cfg.pointwise_lr = value.get<double>();
    else if (key == "act") cfg.act = value.get<std::string>();
    else if (key == "ricker-a") cfg.ricker_a = value.get<double>();
    else if (key == "sampler") cfg.sampler = value.get<std::string>();
    else if (key == "dim") cfg.dim = value.get<int>();
    else if (key == "samples") cfg.samples = value.get<int>();
    else if (key == "a0") cfg.a0 = value.get<double>();
    else if (key == "b0") cfg.b0 = value.get<double>();
    else if (key == "r0") cfg.r0 = value.get<double>();
    else if (key == "xi-min") cfg.xi_min = value.get<double>();
    else if (key == "xi-max") cfg.xi_max = value.get<double>();
    else if (key == "xi-points") cfg.xi_points = value.get<int>();
    else throw InvalidInput("config: unknown key '" + key + "'");
  }
}

void merge_config_file(RunConfig& cfg, const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size())
        throw InvalidInput("--config needs a file path");
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    }
  }
  if (path.empty()) return;
  try {
    apply_config_file(cfg, load_manifest(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

int run_fft_check(const RunConfig& cfg) {
  const auto out = resolve_out_dir(cfg);
  Rng rng(cfg.train.seed);
  std::vector<int> sizes;
  for (int n = 1; n <= 128; ++n) sizes.push_back(n);
  for (int i = 0; i < 100; ++i)
    sizes.push_back(129 + static_cast<int>(rng.bounded(384)));

  double max_bin_err = 0.0, max_roundtrip = 0.0, max_parseval = 0.0;
  for (int n : sizes) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.normal();
    const Spectrum fast = rfft(x);
    const Spectrum slow = rdft_naive(x);
    max_bin_err = std::max(max_bin_err,
                           (fast.bins - slow.bins).cwiseAbs().maxCoeff());
    max_roundtrip =
        std::max(max_roundtrip, (irfft(fast) - x).cwiseAbs().maxCoeff());

    double spectral = std::norm(fast.bins[0]);
    for (int k = 1; k < fast.bin_count() - 1; ++k)
      spectral += 2.0 * std::norm(fast.bins[k]);
    if (fast.bin_count() > 1)
      spectral += (n % 2 == 0 ? 1.0 : 2.0) *
                  std::norm(fast.bins[fast.bin_count() - 1]);
    spectral /= n;
    const double time_energy = x.squaredNorm();
    max_parseval = std::max(
        max_parseval, std::abs(spectral - time_energy) /
                          std::max(1.0, std::abs(time_energy)));
  }

  nlohmann::json manifest = base_manifest("fft-check", cfg, out);
  manifest["sizes_checked"] = sizes.size();
  manifest["max_bin_error"] = max_bin_err;
  manifest["max_roundtrip_error"] = max_roundtrip;
  manifest["max_parseval_rel_error"] = max_parseval;
  manifest["outputs"] = nlohmann::json::array();
  write_manifest((out / "manifest.json").string(), manifest);

  const bool ok =
      max_bin_err < 1e-9 && max_roundtrip < 1e-9 && max_parseval < 1e-9;
  std::cout << "fft check over " << sizes.size()
            << " sizes: max bin error " << format_g17(max_bin_err)
            << ", roundtrip " << format_g17(max_roundtrip) << ", parseval "
            << format_g17(max_parseval) << (ok ? " (ok)" : " (FAILED)")
            << '\n';
  if (!ok) {
    std::cerr << "error: transform disagrees with the direct-sum oracle\n";
    return 1;
  }
  return 0;
}

int run_synth_bias(const RunConfig& cfg) {
  const auto out = resolve_out_dir(cfg);
  SineSumSpec synth = cfg.synth;
  synth.seed = cfg.train.seed;
  const MultiSeries series = gen_sine_sum(synth);
  const long n = series.length();
  const Eigen::MatrixXd coords = synth_coordinates(n);
  const Eigen::VectorXd truth = series.values.row(0).transpose();

  MLPRegressor model =
      MLPRegressor::init(1, cfg.width, 1, activation_kind(cfg), cfg.train.seed);
  const SnapshotSeries snapshots =
      train_pointwise(model, coords, series.values, cfg.iterations,
                      cfg.pointwise_lr, cfg.snapshot_every);

  std::vector<double> target_bins;
  for (double omega : synth.angular_frequencies)
    target_bins.push_back(omega * static_cast<double>(n) * synth.dx /
                          (2.0 * std::numbers::pi));
  const FrequencyTrajectory trajectory =
      frequency_trajectory(model, snapshots, coords, truth, target_bins);
  write_trajectory_csv((out / "trajectory.csv").string(), trajectory);

  nlohmann::json manifest = base_manifest("synth-bias", cfg, out);
  nlohmann::json crossings = nlohmann::json::array();
  const auto first = first_crossings(trajectory, 0.3);
  for (std::size_t f = 0; f < first.size(); ++f) {
    nlohmann::json row;
    row["freq"] = trajectory.freqs[f];
    row["first_iteration_below_0.3"] =
        first[f] ? nlohmann::json(*first[f]) : nlohmann::json();
    crossings.push_back(row);
  }
  manifest["crossings"] = crossings;
  manifest["outputs"] = {"trajectory.csv"};
  write_manifest((out / "manifest.json").string(), manifest);

  std::cout << "wrote " << (out / "trajectory.csv").string() << " ("
            << trajectory.iterations.size() << " snapshots, "
            << trajectory.freqs.size() << " frequencies)\n";
  return 0;
}

int run_train(const RunConfig& cfg, bool diagnose) {
  const auto out = resolve_out_dir(cfg);
  const Prepared prepared = prepare_windows(cfg);
  const FreLEConfig loss = loss_config(cfg);
  TrainConfig train_cfg = cfg.train;
  train_cfg.validate();

  const LinearForecaster start = LinearForecaster::init(
      model_mode(cfg.model), cfg.lookback, cfg.horizon, cfg.train.seed,
      !cfg.individual, prepared.channels, cfg.kernel);

  BiasProfile profile;
  BandPartition bands{};
  EpochCallback callback;
  if (diagnose) {
    bands = band_partition(one_sided_bins(cfg.horizon));
    callback = [&](int, const LinearForecaster& m) {
      profile.bands.push_back(spectral_bias_report(m, prepared.test, bands));
      profile.metrics.push_back(evaluate(m, prepared.test));
    };
  }

  const TrainResult result =
      train(start, prepared.train, prepared.val, loss, train_cfg, callback);
  const Metrics metrics = evaluate(result.model, prepared.test);

  std::vector<std::string> outputs{"epochs.csv", "checkpoint.json"};
  write_epochs_csv((out / "epochs.csv").string(), result.logs);
  save_checkpoint((out / "checkpoint.json").string(), result.model);
  if (diagnose) {
    write_bias_profile_csv((out / "bias_profile.csv").string(), profile);
    write_table_report_csv(
        (out / "report.csv").string(),
        spectral_bias_report(result.model, prepared.test, bands), metrics);
    outputs.push_back("bias_profile.csv");
    outputs.push_back("report.csv");
  }

  nlohmann::json manifest =
      base_manifest(diagnose ? "diagnose" : "train", cfg, out);
  manifest["source"] = prepared.source;
  manifest["resolved_split"] = prepared.split;
  manifest["windows"] = {{"train", prepared.train.size()},
                         {"val", prepared.val.size()},
                         {"test", prepared.test.size()}};
  manifest["mse"] = metrics.mse;
  manifest["mae"] = metrics.mae;
  manifest["best_epoch"] = result.best_epoch;
  manifest["epochs_run"] = result.logs.size();
  manifest["outputs"] = outputs;
  write_manifest((out / "manifest.json").string(), manifest);

  std::cout << "test mse " << format_g17(metrics.mse) << ", mae "
            << format_g17(metrics.mae) << " (best epoch " << result.best_epoch
            << "); artifacts in " << out.string() << '\n';
  return 0;
}

int run_sweep(const RunConfig& cfg, bool prune) {
  const auto out = resolve_out_dir(cfg);
  const std::string grid_text =
      !cfg.grid.empty() ? cfg.grid : (prune ? "0.1:1:0.1" : "0:1:0.1");
  const std::vector<double> grid = parse_grid(grid_text);
  const Prepared prepared = prepare_windows(cfg);
  const ExperimentPlan plan = make_experiment_plan(cfg, prepared);

  const SweepResult sweep =
      prune ? pruning_sweep(plan, grid) : delta_sweep(plan, grid);
  write_sweep_csv((out / "sweep.csv").string(), sweep);

  nlohmann::json manifest =
      base_manifest(prune ? "prune-sweep" : "sweep-delta", cfg, out);
  manifest["source"] = prepared.source;
  manifest["resolved_split"] = prepared.split;
  manifest["grid"] = grid;
  manifest["argmin"] = sweep.argmin;
  const auto& best = sweep.points[static_cast<std::size_t>(sweep.argmin)];
  manifest["best"] = {{"grid_value", best.grid_value},
                      {"mse", best.metrics.mse},
                      {"mae", best.metrics.mae},
                      {"seed", best.seed}};
  manifest["outputs"] = {"sweep.csv"};
  write_manifest((out / "manifest.json").string(), manifest);

  std::cout << "swept " << grid.size() << " points; best "
            << (prune ? "retention " : "delta ") << format_g17(best.grid_value)
            << " with mse " << format_g17(best.metrics.mse) << '\n';
  return 0;
}

int run_ablate(const RunConfig& cfg) {
  const auto out = resolve_out_dir(cfg);
  const Prepared prepared = prepare_windows(cfg);
  const ExperimentPlan plan = make_experiment_plan(cfg, prepared);
  const std::vector<AblationRow> rows = ablation_matrix(plan);
  write_ablation_csv((out / "ablation.csv").string(), rows);

  nlohmann::json manifest = base_manifest("ablate", cfg, out);
  manifest["source"] = prepared.source;
  manifest["resolved_split"] = prepared.split;
  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : rows)
    table.push_back({{"setting", row.setting},
                     {"mse", row.metrics.mse},
                     {"mae", row.metrics.mae}});
  manifest["rows"] = table;
  manifest["outputs"] = {"ablation.csv"};
  write_manifest((out / "manifest.json").string(), manifest);

  std::cout << "ablation over " << rows.size() << " settings written to "
            << (out / "ablation.csv").string() << '\n';
  return 0;
}

int run_theory_curves(const RunConfig& cfg) {
  const auto out = resolve_out_dir(cfg);
  if (cfg.xi_points < 1) throw InvalidInput("xi-points must be >= 1");
  if (!(cfg.xi_min > 0.0) || cfg.xi_max < cfg.xi_min)
    throw InvalidInput("need 0 < xi-min <= xi-max");

  InitSampler sampler;
  sampler.mode = sampler_mode(cfg.sampler);
  sampler.a0 = cfg.a0;
  sampler.b0 = cfg.b0;
  sampler.r0 = cfg.r0;
  sampler.seed = cfg.train.seed;
  sampler.count = cfg.samples;

  std::vector<double> xi(static_cast<std::size_t>(cfg.xi_points));
  for (int i = 0; i < cfg.xi_points; ++i)
    xi[static_cast<std::size_t>(i)] =
        cfg.xi_points == 1
            ? cfg.xi_min
            : cfg.xi_min * std::pow(cfg.xi_max / cfg.xi_min,
                                    static_cast<double>(i) /
                                        static_cast<double>(cfg.xi_points - 1));
  std::vector<double> relu(xi.size()), tanh_curve(xi.size());
  for (std::size_t i = 0; i < xi.size(); ++i) {
    relu[i] = gamma_relu_sq(xi[i], cfg.dim, sampler);
    tanh_curve[i] = gamma_tanh_sq(xi[i], cfg.dim, sampler);
  }
  write_decay_curves_csv((out / "decay_curves.csv").string(), xi, relu,
                         tanh_curve);

  nlohmann::json manifest = base_manifest("theory-curves", cfg, out);
  manifest["outputs"] = {"decay_curves.csv"};
  write_manifest((out / "manifest.json").string(), manifest);

  std::cout << "wrote " << (out / "decay_curves.csv").string() << " ("
            << xi.size() << " frequencies)\n";
  return 0;
}

void add_common_options(CLI::App* sub, RunConfig& cfg, std::string& config_path) {
  sub->add_option("--config", config_path,
                  "JSON file of defaults; explicit flags win");
  sub->add_option("--seed", cfg.train.seed, "seed for every random choice")
      ->capture_default_str();
  sub->add_option("--out", cfg.out_dir,
                  "output directory (default: runs/<timestamp>-<seed>)");
}

void add_loss_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--delta", cfg.loss.delta,
                  "frequency loss weight in [0, 1]")
      ->capture_default_str();
  sub->add_option("--d", cfg.loss.d, "local-maximum window width")
      ->capture_default_str();
  sub->add_option("--eta", cfg.loss.eta,
                  "rescale divisor at local maxima (default: B, the spectrum "
                  "bin count)");
  sub->add_option("--time-loss", cfg.time_loss, "time-domain loss, mae or mse")
      ->capture_default_str();
  sub->add_flag("--implicit,!--no-implicit", cfg.loss.implicit_enabled,
                "rescale local spectral maxima by index/eta (default: on)");
  sub->add_flag("--an,!--no-an", cfg.loss.an_enabled,
                "divide both spectra by the target amplitude instead of the "
                "local-maximum rescale (default: off)");
  sub->add_option("--epsilon-xi", cfg.loss.epsilon_xi,
                  "zero spectrum bins with amplitude below this threshold");
  sub->add_option("--retention", cfg.loss.retention,
                  "keep only this fraction of spectrum bins, smallest "
                  "amplitudes pruned first");
}

void add_train_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--epochs", cfg.train.epochs, "training epochs")
      ->capture_default_str();
  sub->add_option("--batch", cfg.train.batch_size, "mini-batch size")
      ->capture_default_str();
  sub->add_option("--lr", cfg.train.lr, "Adam learning rate")
      ->capture_default_str();
  sub->add_option("--patience", cfg.train.patience,
                  "epochs without validation improvement before stopping")
      ->capture_default_str();
}

void add_synth_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--points", cfg.synth.n_points, "synthetic series length")
      ->capture_default_str();
  sub->add_option("--noise", cfg.synth.noise_std,
                  "gaussian noise level on the synthetic signal")
      ->capture_default_str();
  sub->add_option("--coeffs", cfg.synth.coefficients,
                  "sine component coefficients")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--freqs", cfg.synth.angular_frequencies,
                  "sine angular frequencies")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--dx", cfg.synth.dx, "sample spacing of the synthetic grid")
      ->capture_default_str();
}

void add_data_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--data", cfg.data_path,
                  "CSV dataset (timestamp column first); omit for synthetic "
                  "data");
  sub->add_option("--lookback", cfg.lookback, "input window length")
      ->capture_default_str();
  sub->add_option("--horizon", cfg.horizon, "forecast window length")
      ->capture_default_str();
  sub->add_option("--split", cfg.split_mode,
                  "auto, preset (8640/2880/2880) or fractional (0.7/0.1/0.2); "
                  "auto picks preset for series of 14400+ steps")
      ->capture_default_str();
  sub->add_option("--model", cfg.model,
                  "dlinear (trend/seasonal decomposition) or plain")
      ->capture_default_str();
  sub->add_flag("--individual", cfg.individual,
                "per-channel weights instead of shared ones");
  sub->add_option("--kernel", cfg.kernel,
                  "moving-average window of the dlinear trend")
      ->capture_default_str();
  add_synth_options(sub, cfg);
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  if (text.empty()) throw InvalidInput("empty grid");
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    if (second == std::string::npos || text.find(':', second + 1) != std::string::npos)
      throw InvalidInput("range grid must be start:end:step, got '" + text +
                         "'");
    const double start = parse_number(text.substr(0, first));
    const double end = parse_number(text.substr(first + 1, second - first - 1));
    const double step = parse_number(text.substr(second + 1));
    if (step <= 0.0) throw InvalidInput("grid step must be positive");
    if (end < start) throw InvalidInput("grid end must be >= start");
    for (int i = 0;; ++i) {
      const double value = start + static_cast<double>(i) * step;
      if (value > end + 1e-9) break;
      values.push_back(std::min(value, end));
    }
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = text.find(',', pos);
      const auto piece = text.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      values.push_back(parse_number(piece));
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  if (values.empty()) throw InvalidInput("empty grid");
  return values;
}

int dispatch(const std::vector<std::string>& args) {
  RunConfig cfg;
  try {
    merge_config_file(cfg, args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  CLI::App app{"frequency-regularized forecasting laboratory"};
  app.require_subcommand(1);
  std::string config_path;

  CLI::App* fft = app.add_subcommand(
      "fft-check", "compare the fast transform against the direct-sum oracle");
  add_common_options(fft, cfg, config_path);

  CLI::App* synth_bias = app.add_subcommand(
      "synth-bias",
      "train a pointwise two-layer network on a sine sum and track per-"
      "frequency amplitude error");
  add_common_options(synth_bias, cfg, config_path);
  add_synth_options(synth_bias, cfg);
  synth_bias->add_option("--width", cfg.width, "hidden layer width")
      ->capture_default_str();
  synth_bias->add_option("--iters", cfg.iterations, "full-batch Adam steps")
      ->capture_default_str();
  synth_bias
      ->add_option("--snapshot-every", cfg.snapshot_every,
                   "iterations between parameter snapshots")
      ->capture_default_str();
  synth_bias
      ->add_option("--pointwise-lr", cfg.pointwise_lr, "Adam learning rate")
      ->capture_default_str();
  synth_bias
      ->add_option("--act", cfg.act, "activation: tanh, relu or ricker")
      ->capture_default_str();
  synth_bias
      ->add_option("--ricker-a", cfg.ricker_a, "ricker width parameter")
      ->capture_default_str();

  CLI::App* train_cmd = app.add_subcommand(
      "train", "fit a forecaster and report test mse/mae");
  add_common_options(train_cmd, cfg, config_path);
  add_data_options(train_cmd, cfg);
  add_loss_options(train_cmd, cfg);
  add_train_options(train_cmd, cfg);

  CLI::App* diagnose = app.add_subcommand(
      "diagnose",
      "train while profiling per-epoch band errors on the test windows");
  add_common_options(diagnose, cfg, config_path);
  add_data_options(diagnose, cfg);
  add_loss_options(diagnose, cfg);
  add_train_options(diagnose, cfg);

  CLI::App* sweep_delta = app.add_subcommand(
      "sweep-delta", "train once per delta value and tabulate test metrics");
  add_common_options(sweep_delta, cfg, config_path);
  add_data_options(sweep_delta, cfg);
  add_loss_options(sweep_delta, cfg);
  add_train_options(sweep_delta, cfg);
  sweep_delta->add_option(
      "--grid", cfg.grid,
      "delta values, start:end:step or comma list (default 0:1:0.1)");

  CLI::App* prune_sweep = app.add_subcommand(
      "prune-sweep",
      "train once per spectrum retention fraction and tabulate test metrics");
  add_common_options(prune_sweep, cfg, config_path);
  add_data_options(prune_sweep, cfg);
  add_loss_options(prune_sweep, cfg);
  add_train_options(prune_sweep, cfg);
  prune_sweep->add_option(
      "--grid", cfg.grid,
      "retention fractions, start:end:step or comma list (default "
      "0.1:1:0.1)");

  CLI::App* ablate = app.add_subcommand(
      "ablate",
      "train the rescaled, bare and normalized loss variants on one seed");
  add_common_options(ablate, cfg, config_path);
  add_data_options(ablate, cfg);
  add_loss_options(ablate, cfg);
  add_train_options(ablate, cfg);

  CLI::App* theory = app.add_subcommand(
      "theory-curves",
      "tabulate the analytic gamma^2 spectral decay for relu and tanh");
  add_common_options(theory, cfg, config_path);
  theory->add_option("--sampler", cfg.sampler,
                     "point_mass, gaussian or gaussian_abs")
      ->capture_default_str();
  theory->add_option("--dim", cfg.dim, "input dimension")
      ->capture_default_str();
  theory->add_option("--samples", cfg.samples,
                     "Monte Carlo draws for the gaussian samplers")
      ->capture_default_str();
  theory->add_option("--a0", cfg.a0, "point-mass output weight")
      ->capture_default_str();
  theory->add_option("--b0", cfg.b0, "point-mass bias")
      ->capture_default_str();
  theory->add_option("--r0", cfg.r0, "point-mass inverse input scale")
      ->capture_default_str();
  theory->add_option("--xi-min", cfg.xi_min, "smallest frequency norm")
      ->capture_default_str();
  theory->add_option("--xi-max", cfg.xi_max, "largest frequency norm")
      ->capture_default_str();
  theory->add_option("--xi-points", cfg.xi_points,
                     "geometric grid resolution")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\nrun with --help for usage\n";
    return 2;
  }

  try {
    if (app.got_subcommand(fft)) return run_fft_check(cfg);
    if (app.got_subcommand(synth_bias)) return run_synth_bias(cfg);
    if (app.got_subcommand(train_cmd)) return run_train(cfg, false);
    if (app.got_subcommand(diagnose)) return run_train(cfg, true);
    if (app.got_subcommand(sweep_delta)) return run_sweep(cfg, false);
    if (app.got_subcommand(prune_sweep)) return run_sweep(cfg, true);
    if (app.got_subcommand(ablate)) return run_ablate(cfg);
    if (app.got_subcommand(theory)) return run_theory_curves(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  std::cerr << "error: no subcommand selected\n";
  return 2;
}

}  // namespace frele
