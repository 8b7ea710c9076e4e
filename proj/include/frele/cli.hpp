#pragma once

#include <string>
#include <vector>

#include "frele/data_io.hpp"
#include "frele/loss.hpp"
#include "frele/timeseries.hpp"
#include "frele/trainer.hpp"

namespace frele {

/**
 * Resolved settings for one command-line run: defaults, then values from a
 * JSON config file, then explicit flags, later sources winning. Fields not
 * used by the chosen subcommand are ignored but still echoed into the
 * manifest.
 */
struct RunConfig {
  TrainConfig train;
  FreLEConfig loss;
  std::string time_loss = "mae";
  std::string split_mode = "auto";
  std::string model = "dlinear";
  bool individual = false;
  int kernel = 25;
  std::string data_path;
  SineSumSpec synth{.n_points = 2048};
  int lookback = 96;
  int horizon = 96;
  std::string out_dir;
  std::string grid;
  int width = 256;
  int iterations = 10000;
  int snapshot_every = 25;
  double pointwise_lr = 0.01;
  std::string act = "tanh";
  double ricker_a = 1.0;
  std::string sampler = "point_mass";
  int dim = 1;
  int samples = 1;
  double a0 = 1.0;
  double b0 = 1.0;
  double r0 = 1.0;
  double xi_min = 0.5;
  double xi_max = 32.0;
  int xi_points = 50;
};

/**
 * Runs one subcommand; args exclude the program name. Returns 0 on
 * success, 1 on a runtime or configuration failure (one-line reason on
 * stderr) and 2 on unparseable arguments.
 */
int dispatch(const std::vector<std::string>& args);

/** "start:end:step" inclusive range or comma-separated list of numbers. */
std::vector<double> parse_grid(const std::string& text);

}  // namespace frele
