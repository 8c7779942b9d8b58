#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sae/generative.hpp"
#include "sae/trainer.hpp"

namespace sae {

/// Flat key = value configuration with [model], [train] and [experiment]
/// sections. Parsing is strict: unknown sections or keys are rejected with
/// the offending line number, and parse(serialize()) is lossless.
struct ExperimentConfig {
  // [model]
  Family family = Family::GMM;
  std::size_t n = 784;
  std::size_t m = 10;
  std::size_t k = 1;
  double a1 = 1.0;
  double a2 = 1.0;
  double sigma_eta = 0.01;

  // [train]
  double zeta = 0.0;  // 0: family default (m for GMM, m/k otherwise)
  std::size_t iters = 50;
  BiasRule bias_rule = BiasRule::GeometricDecay;
  double bias_c = 2.0;
  double bias_b0 = -1.25;
  InitScheme init = InitScheme::Perturbed;
  double init_delta = 0.5;
  GradientSource gradient = GradientSource::MonteCarlo;
  std::size_t batch_size = 10000;
  bool fresh_batches = true;
  Activation activation = Activation::ReLU;
  double threshold = 0.0;  // 0: a1/2

  // [experiment]
  std::vector<double> noise_levels = {0.01, 0.02, 0.03};
  std::vector<InitScheme> init_schemes = {InitScheme::Perturbed, InitScheme::PCA,
                                          InitScheme::Random};
  std::string out_dir = "out";
  std::uint64_t seed = 7;
  bool svg = false;

  ModelSpec to_model_spec() const;
  ModelSpec to_model_spec(double sigma_override) const;
  TrainConfig to_train_config(const ModelSpec& spec) const;

  std::string serialize() const;
  static ExperimentConfig parse(const std::string& text);
};

std::string to_string(Family f);
std::string to_string(InitScheme s);
std::string to_string(BiasRule r);
std::string to_string(GradientSource g);
std::string to_string(Activation a);

struct FigureRun {
  InitScheme init = InitScheme::Perturbed;
  double sigma = 0.0;
  TrainTrace trace;
};

/// Full learning-curve grid: every configured init scheme at every noise
/// level, one trace CSV per cell (fig1_<init>_<sigma>.csv). Cells run as
/// independent tasks; runs sharing a noise level share the dictionary and
/// data streams.
std::vector<FigureRun> reproduce_fig1(const ExperimentConfig& config);

/// Matched recovery-error comparison at the first configured noise level:
/// the three init schemes on one dataset, written to fig2_matched_error.csv
/// (header iter,<init names...>).
std::vector<FigureRun> reproduce_fig2(const ExperimentConfig& config);

/// Entry point behind the `shallowae` binary; exposed so tests can drive
/// the CLI in-process. args excludes argv[0]. Returns the process exit
/// code: 0 ok, 1 config error, 2 runtime failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace sae
