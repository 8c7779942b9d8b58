#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "sae/experiment.hpp"
#include "sae/text_io.hpp"

namespace sae {

namespace {

namespace fs = std::filesystem;

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  bool out_set = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool svg = false;
  std::string gradient;
  std::string family;
  std::string fresh_batches;
};

ExperimentConfig load_config(const CliOptions& opt) {
  ExperimentConfig cfg;
  if (!opt.config_path.empty()) cfg = ExperimentConfig::parse(read_text_file(opt.config_path));
  if (opt.seed_set) cfg.seed = opt.seed;
  if (opt.out_set) cfg.out_dir = opt.out_dir;
  if (opt.svg) cfg.svg = true;
  if (!opt.gradient.empty())
    cfg.gradient = opt.gradient == "mc" ? GradientSource::MonteCarlo
                                        : GradientSource::ClosedFormOracle;
  if (!opt.family.empty()) {
    if (opt.family == "gmm") cfg.family = Family::GMM;
    else if (opt.family == "sparse") cfg.family = Family::SparseCoding;
    else cfg.family = Family::NonNegSparse;
  }
  if (!opt.fresh_batches.empty()) cfg.fresh_batches = opt.fresh_batches == "true";
  return cfg;
}

int run_generate(const ExperimentConfig& cfg) {
  const ModelSpec spec = cfg.to_model_spec();
  Rng dict_rng(cfg.seed, 0);
  const Dictionary dict = sample_dictionary(spec, dict_rng);
  Rng data_rng(cfg.seed, 1);
  const auto samples = sample_batch(dict, spec, cfg.batch_size, data_rng);

  fs::create_directories(cfg.out_dir);
  write_matrix_file((fs::path(cfg.out_dir) / "dict.mat").string(), dict.A);

  Matrix y(spec.n, samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j)
    for (std::size_t r = 0; r < spec.n; ++r) y(r, j) = samples[j].y[r];
  write_matrix_file((fs::path(cfg.out_dir) / "data.mat").string(), y);

  std::string codes;
  for (const Sample& s : samples) {
    for (std::size_t t = 0; t < s.code.support.size(); ++t) {
      if (t > 0) codes += ' ';
      codes += std::to_string(s.code.support[t]) + ":" + format_shortest(s.code.values[t]);
    }
    codes += '\n';
  }
  write_text_file((fs::path(cfg.out_dir) / "codes.txt").string(), codes);

  std::cout << "wrote dict.mat (" << spec.n << "x" << spec.m << ", mu=" << format_shortest(dict.mu)
            << "), data.mat (" << spec.n << "x" << samples.size() << "), codes.txt to "
            << cfg.out_dir << "\n";
  return 0;
}

int run_train(const ExperimentConfig& cfg) {
  const ModelSpec spec = cfg.to_model_spec();
  Rng dict_rng(cfg.seed, 0);
  const Dictionary dict = sample_dictionary(spec, dict_rng);
  const TrainConfig tc = cfg.to_train_config(spec);
  const TrainResult result = train(dict, spec, tc);

  fs::create_directories(cfg.out_dir);
  write_text_file((fs::path(cfg.out_dir) / "trace.csv").string(), trace_to_csv(result.trace));
  write_matrix_file((fs::path(cfg.out_dir) / "weights.mat").string(), result.params.W);

  const TraceRow& last = result.trace.rows.back();
  std::cout << "trained " << to_string(cfg.family) << " for " << cfg.iters
            << " iterations: final loss " << format_shortest(last.loss) << ", matched frob_err "
            << format_shortest(last.frob_err) << "\n";
  return 0;
}

int run_verify(const ExperimentConfig& cfg) {
  const ModelSpec spec = cfg.to_model_spec();
  Rng dict_rng(cfg.seed, 0);
  const Dictionary dict = spec.m <= spec.n ? orthonormal_dictionary(spec, dict_rng)
                                           : sample_dictionary(spec, dict_rng);

  // Closeness pinned to the consistency-theorem regime, independent of the
  // training perturbation size.
  const double delta = 0.05;
  Rng perturb_rng(cfg.seed, 1);
  AutoencoderParams params;
  params.W = perturb_dictionary_exact(dict.A, delta, perturb_rng);
  // The sparse family's consistency result covers only the thresholding
  // activation; ReLU with the prescribed bias covers the other two.
  params.activation =
      spec.family == Family::SparseCoding ? Activation::Threshold : cfg.activation;
  params.lambda = cfg.threshold > 0.0 ? cfg.threshold : threshold_level(spec.a1);
  const double bias = params.activation == Activation::ReLU ? theorem_relu_bias(spec, delta) : 0.0;
  params.b.assign(spec.m, bias);

  Rng batch_rng(cfg.seed, 2);
  const std::size_t count = std::min<std::size_t>(cfg.batch_size, 10000);
  const auto samples = sample_batch(dict, spec, count, batch_rng);

  std::vector<ClaimReport> reports = verify_claim_bounds(params.W, dict.A, samples, spec);

  // correlation lemma margins from the family's closed-form oracle, at the
  // zero bias the lemmas' bias conditions always admit
  const Vector zero_bias(spec.m, 0.0);
  GradientEstimate g;
  switch (spec.family) {
    case Family::GMM:
      g = expected_gradient_gmm(params.W, zero_bias, dict.A);
      break;
    case Family::SparseCoding:
      g = expected_gradient_sparse(params.W, dict.A, spec.p_single(), spec.p_pair());
      break;
    case Family::NonNegSparse:
      g = expected_gradient_nonneg(params.W, zero_bias, dict.A, spec, spec.p_single(),
                                   spec.p_pair(), spec.p_triple());
      break;
  }
  const Vector margins = correlation_margin(g, params.W, dict.A, spec);
  ClaimReport corr{"corr_" + to_string(spec.family), margins.size(), 0, margins.empty() ? 0.0 : margins[0]};
  for (double v : margins) {
    corr.worst_margin = std::min(corr.worst_margin, v);
    if (v < -1e-10) ++corr.violations;
  }
  reports.push_back(corr);

  Rng rate_rng(cfg.seed, 3);
  const double rate = consistency_rate(dict, spec, params, count, rate_rng);
  ClaimReport consist{"thm1_consistency", count,
                      static_cast<std::size_t>(std::lround((1.0 - rate) * count)),
                      rate - 0.999};
  reports.push_back(consist);

  fs::create_directories(cfg.out_dir);
  write_text_file((fs::path(cfg.out_dir) / "claim_report.csv").string(), claims_to_csv(reports));
  for (const ClaimReport& r : reports)
    std::cout << r.claim_id << ": " << r.violations << "/" << r.instances
              << " violations, worst margin " << format_shortest(r.worst_margin) << "\n";
  return 0;
}

int run_match(const ExperimentConfig& cfg, const std::string& w_path, const std::string& a_path,
              bool out_given) {
  const Matrix w = read_matrix_file(w_path);
  const Matrix a = read_matrix_file(a_path);
  const bool flips = cfg.family == Family::SparseCoding;
  const Closeness c = closeness(w, a, flips);
  std::cout << "frobenius_sq = " << format_shortest(c.match.frobenius_sq) << "\n";
  std::cout << "delta = " << format_shortest(c.delta) << "\n";
  if (out_given) {
    fs::create_directories(cfg.out_dir);
    write_text_file((fs::path(cfg.out_dir) / "match.csv").string(), match_to_csv(c.match));
  }
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"two-layer weight-sharing autoencoder learning experiments"};
  app.require_subcommand(1);

  CliOptions opt;
  app.add_option("--config", opt.config_path, "configuration file");
  app.add_option("--seed", opt.seed, "base RNG seed")->each([&](const std::string&) {
    opt.seed_set = true;
  });
  app.add_option("--out", opt.out_dir, "output directory")->each([&](const std::string&) {
    opt.out_set = true;
  });
  app.add_flag("--svg", opt.svg, "also emit SVG plots");
  app.add_option("--gradient", opt.gradient, "gradient source")
      ->check(CLI::IsMember({"mc", "oracle"}));
  app.add_option("--family", opt.family, "generative family")
      ->check(CLI::IsMember({"gmm", "sparse", "nonneg"}));
  app.add_option("--fresh-batches", opt.fresh_batches, "resample each iteration")
      ->check(CLI::IsMember({"true", "false"}));

  auto* gen = app.add_subcommand("generate", "write dictionary and dataset files");
  auto* tr = app.add_subcommand("train", "run one training cell, write trace and weights");
  auto* ver = app.add_subcommand("verify", "run the claim and lemma suite");
  auto* mat = app.add_subcommand("match", "match two weight files");
  gen->fallthrough();
  tr->fallthrough();
  ver->fallthrough();
  mat->fallthrough();
  std::string w_path, a_path;
  mat->add_option("W", w_path, "weights file")->required();
  mat->add_option("A", a_path, "reference file")->required();
  auto* rep = app.add_subcommand("reproduce", "rerun a figure grid");
  rep->fallthrough();
  std::string figure;
  rep->add_option("figure", figure, "fig1 or fig2")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2"}));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  ExperimentConfig cfg;
  try {
    cfg = load_config(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (gen->parsed()) return run_generate(cfg);
    if (tr->parsed()) return run_train(cfg);
    if (ver->parsed()) return run_verify(cfg);
    if (mat->parsed()) return run_match(cfg, w_path, a_path, opt.out_set);
    if (rep->parsed()) {
      if (figure == "fig1")
        reproduce_fig1(cfg);
      else
        reproduce_fig2(cfg);
      std::cout << "wrote " << figure << " outputs to " << cfg.out_dir << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidModel& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace sae
