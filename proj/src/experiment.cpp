#include "sae/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <map>
#include <sstream>

#include "sae/text_io.hpp"

namespace sae {

std::string to_string(Family f) {
  switch (f) {
    case Family::GMM: return "gmm";
    case Family::SparseCoding: return "sparse";
    case Family::NonNegSparse: return "nonneg";
  }
  return "gmm";
}

std::string to_string(InitScheme s) {
  switch (s) {
    case InitScheme::Perturbed: return "perturbed";
    case InitScheme::PCA: return "pca";
    case InitScheme::Random: return "random";
  }
  return "perturbed";
}

std::string to_string(BiasRule r) {
  return r == BiasRule::ZeroBias ? "zero" : "geometric";
}

std::string to_string(GradientSource g) {
  return g == GradientSource::MonteCarlo ? "mc" : "oracle";
}

std::string to_string(Activation a) { return a == Activation::ReLU ? "relu" : "threshold"; }

namespace {

Family family_from_string(const std::string& s, std::size_t line) {
  if (s == "gmm") return Family::GMM;
  if (s == "sparse") return Family::SparseCoding;
  if (s == "nonneg") return Family::NonNegSparse;
  throw ConfigError(line, "unknown family '" + s + "' (expected gmm|sparse|nonneg)");
}

InitScheme init_from_string(const std::string& s, std::size_t line) {
  if (s == "perturbed") return InitScheme::Perturbed;
  if (s == "pca") return InitScheme::PCA;
  if (s == "random") return InitScheme::Random;
  throw ConfigError(line, "unknown init '" + s + "' (expected perturbed|pca|random)");
}

BiasRule bias_from_string(const std::string& s, std::size_t line) {
  if (s == "zero") return BiasRule::ZeroBias;
  if (s == "geometric") return BiasRule::GeometricDecay;
  throw ConfigError(line, "unknown bias_rule '" + s + "' (expected zero|geometric)");
}

GradientSource gradient_from_string(const std::string& s, std::size_t line) {
  if (s == "mc") return GradientSource::MonteCarlo;
  if (s == "oracle") return GradientSource::ClosedFormOracle;
  throw ConfigError(line, "unknown gradient '" + s + "' (expected mc|oracle)");
}

Activation activation_from_string(const std::string& s, std::size_t line) {
  if (s == "relu") return Activation::ReLU;
  if (s == "threshold") return Activation::Threshold;
  throw ConfigError(line, "unknown activation '" + s + "' (expected relu|threshold)");
}

bool bool_from_string(const std::string& s, std::size_t line) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError(line, "expected true|false, got '" + s + "'");
}

double double_from_string(const std::string& s, std::size_t line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(line, "bad float '" + s + "'");
  }
}

std::uint64_t u64_from_string(const std::string& s, std::size_t line) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(line, "bad integer '" + s + "'");
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t x = base ^ (salt * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Minimal polyline plot, one series per curve.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<std::string>& names,
                    const std::vector<std::vector<double>>& series) {
  const double width = 640, height = 420, ml = 60, mr = 20, mt = 40, mb = 40;
  double ymax = 1e-12;
  std::size_t xmax = 1;
  for (const auto& s : series) {
    xmax = std::max(xmax, s.size() > 0 ? s.size() - 1 : 1);
    for (double v : s) ymax = std::max(ymax, v);
  }
  const char* colors[] = {"#c23b22", "#1f4e9c", "#2a7e2a", "#9c27b0", "#ff8f00", "#00695c"};
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
      << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
      << "</text>\n";
  svg << "<line x1='" << ml << "' y1='" << height - mb << "' x2='" << width - mr << "' y2='"
      << height - mb << "' stroke='black'/>\n";
  svg << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << height - mb
      << "' stroke='black'/>\n";
  svg << "<text x='" << ml - 8 << "' y='" << mt + 4 << "' text-anchor='end' font-size='11'>"
      << format_csv(ymax).substr(0, 8) << "</text>\n";
  svg << "<text x='" << ml - 8 << "' y='" << height - mb << "' text-anchor='end' font-size='11'>0</text>\n";
  svg << "<text x='" << width - mr << "' y='" << height - mb + 16
      << "' text-anchor='end' font-size='11'>" << xmax << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    svg << "<polyline fill='none' stroke='" << colors[s % 6] << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < series[s].size(); ++i) {
      const double px = ml + (width - ml - mr) * static_cast<double>(i) / static_cast<double>(xmax);
      const double py = height - mb - (height - mt - mb) * (series[s][i] / ymax);
      svg << px << ',' << py << ' ';
    }
    svg << "'/>\n";
    svg << "<text x='" << width - mr - 4 << "' y='" << mt + 16 + 16 * s
        << "' text-anchor='end' font-size='12' fill='" << colors[s % 6] << "'>" << names[s]
        << "</text>\n";
  }
  svg << "</svg>\n";
  write_text_file(path, svg.str());
}

}  // namespace

ModelSpec ExperimentConfig::to_model_spec() const { return to_model_spec(sigma_eta); }

ModelSpec ExperimentConfig::to_model_spec(double sigma_override) const {
  switch (family) {
    case Family::GMM:
      return ModelSpec::gmm(n, m, sigma_override);
    case Family::SparseCoding:
      return a1 < 1.0 ? ModelSpec::sparse_coding_uniform(n, m, k, a1, sigma_override)
                      : ModelSpec::sparse_coding(n, m, k, sigma_override);
    case Family::NonNegSparse:
      return ModelSpec::nonneg_sparse(n, m, k, a1, a2, sigma_override);
  }
  throw InvalidModel("unknown family");
}

TrainConfig ExperimentConfig::to_train_config(const ModelSpec& spec) const {
  TrainConfig t;
  t.zeta = zeta > 0.0 ? zeta : TrainConfig::default_zeta(spec);
  t.iters = iters;
  t.bias_rule = bias_rule;
  t.bias_c = bias_c;
  t.bias_b0 = bias_b0;
  t.init = init;
  t.init_delta = init_delta;
  t.gradient_source = gradient;
  t.batch_size = batch_size;
  t.fresh_batches = fresh_batches;
  t.activation = activation;
  t.threshold = threshold > 0.0 ? threshold : threshold_level(spec.a1);
  t.seed = seed;
  t.validate();
  return t;
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream out;
  out << "[model]\n";
  out << "family = " << to_string(family) << "\n";
  out << "n = " << n << "\n";
  out << "m = " << m << "\n";
  out << "k = " << k << "\n";
  out << "a1 = " << format_shortest(a1) << "\n";
  out << "a2 = " << format_shortest(a2) << "\n";
  out << "sigma_eta = " << format_shortest(sigma_eta) << "\n";
  out << "\n[train]\n";
  out << "zeta = " << format_shortest(zeta) << "\n";
  out << "iters = " << iters << "\n";
  out << "bias_rule = " << to_string(bias_rule) << "\n";
  out << "bias_c = " << format_shortest(bias_c) << "\n";
  out << "bias_b0 = " << format_shortest(bias_b0) << "\n";
  out << "init = " << to_string(init) << "\n";
  out << "init_delta = " << format_shortest(init_delta) << "\n";
  out << "gradient = " << to_string(gradient) << "\n";
  out << "batch_size = " << batch_size << "\n";
  out << "fresh_batches = " << (fresh_batches ? "true" : "false") << "\n";
  out << "activation = " << to_string(activation) << "\n";
  out << "threshold = " << format_shortest(threshold) << "\n";
  out << "\n[experiment]\n";
  out << "noise_levels = ";
  for (std::size_t i = 0; i < noise_levels.size(); ++i)
    out << (i ? "," : "") << format_shortest(noise_levels[i]);
  out << "\n";
  out << "inits = ";
  for (std::size_t i = 0; i < init_schemes.size(); ++i)
    out << (i ? "," : "") << to_string(init_schemes[i]);
  out << "\n";
  out << "out = " << out_dir << "\n";
  out << "seed = " << seed << "\n";
  out << "svg = " << (svg ? "true" : "false") << "\n";
  return out.str();
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      section = line.substr(1, line.size() - 2);
      if (section != "model" && section != "train" && section != "experiment")
        throw ConfigError(line_no, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line_no, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(line_no, "key outside of any section");

    if (section == "model") {
      if (key == "family") c.family = family_from_string(val, line_no);
      else if (key == "n") c.n = u64_from_string(val, line_no);
      else if (key == "m") c.m = u64_from_string(val, line_no);
      else if (key == "k") c.k = u64_from_string(val, line_no);
      else if (key == "a1") c.a1 = double_from_string(val, line_no);
      else if (key == "a2") c.a2 = double_from_string(val, line_no);
      else if (key == "sigma_eta") c.sigma_eta = double_from_string(val, line_no);
      else throw ConfigError(line_no, "unknown key '" + key + "' in [model]");
    } else if (section == "train") {
      if (key == "zeta") c.zeta = double_from_string(val, line_no);
      else if (key == "iters") c.iters = u64_from_string(val, line_no);
      else if (key == "bias_rule") c.bias_rule = bias_from_string(val, line_no);
      else if (key == "bias_c") c.bias_c = double_from_string(val, line_no);
      else if (key == "bias_b0") c.bias_b0 = double_from_string(val, line_no);
      else if (key == "init") c.init = init_from_string(val, line_no);
      else if (key == "init_delta") c.init_delta = double_from_string(val, line_no);
      else if (key == "gradient") c.gradient = gradient_from_string(val, line_no);
      else if (key == "batch_size") c.batch_size = u64_from_string(val, line_no);
      else if (key == "fresh_batches") c.fresh_batches = bool_from_string(val, line_no);
      else if (key == "activation") c.activation = activation_from_string(val, line_no);
      else if (key == "threshold") c.threshold = double_from_string(val, line_no);
      else throw ConfigError(line_no, "unknown key '" + key + "' in [train]");
    } else {
      if (key == "noise_levels") {
        c.noise_levels.clear();
        for (const auto& tok : split_list(val))
          c.noise_levels.push_back(double_from_string(tok, line_no));
        if (c.noise_levels.empty()) throw ConfigError(line_no, "noise_levels is empty");
      } else if (key == "inits") {
        c.init_schemes.clear();
        for (const auto& tok : split_list(val))
          c.init_schemes.push_back(init_from_string(tok, line_no));
        if (c.init_schemes.empty()) throw ConfigError(line_no, "inits is empty");
      } else if (key == "out") {
        c.out_dir = val;
      } else if (key == "seed") {
        c.seed = u64_from_string(val, line_no);
      } else if (key == "svg") {
        c.svg = bool_from_string(val, line_no);
      } else {
        throw ConfigError(line_no, "unknown key '" + key + "' in [experiment]");
      }
    }
  }
  return c;
}

namespace {

FigureRun run_cell(const ExperimentConfig& base, const Dictionary& dict, InitScheme scheme,
                   double sigma, std::uint64_t cell_seed) {
  ExperimentConfig cfg = base;
  cfg.init = scheme;
  const ModelSpec spec = cfg.to_model_spec(sigma);
  TrainConfig tc = cfg.to_train_config(spec);
  tc.seed = cell_seed;
  FigureRun out;
  out.init = scheme;
  out.sigma = sigma;
  out.trace = train(dict, spec, tc).trace;
  return out;
}

std::string sigma_label(double sigma) {
  std::string s = format_shortest(sigma);
  for (auto& ch : s)
    if (ch == '.') ch = 'p';
  return s;
}

}  // namespace

std::vector<FigureRun> reproduce_fig1(const ExperimentConfig& config) {
  const ModelSpec base_spec = config.to_model_spec();
  Rng dict_rng(config.seed, 0);
  const Dictionary dict = sample_dictionary(base_spec, dict_rng);

  std::filesystem::create_directories(config.out_dir);

  struct Cell {
    InitScheme scheme;
    double sigma;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t si = 0; si < config.noise_levels.size(); ++si)
    for (const InitScheme scheme : config.init_schemes)
      // runs at the same noise level share the data streams
      cells.push_back({scheme, config.noise_levels[si], mix_seed(config.seed, si + 1)});

  std::vector<std::future<FigureRun>> futures;
  futures.reserve(cells.size());
  for (const Cell& cell : cells)
    futures.push_back(std::async(std::launch::async, run_cell, std::cref(config),
                                 std::cref(dict), cell.scheme, cell.sigma, cell.seed));

  std::vector<FigureRun> runs;
  runs.reserve(cells.size());
  for (auto& f : futures) runs.push_back(f.get());

  for (const FigureRun& run : runs) {
    const std::string name =
        "fig1_" + to_string(run.init) + "_" + sigma_label(run.sigma) + ".csv";
    write_text_file((std::filesystem::path(config.out_dir) / name).string(),
                    trace_to_csv(run.trace));
  }

  if (config.svg) {
    for (const InitScheme scheme : config.init_schemes) {
      std::vector<std::string> names;
      std::vector<std::vector<double>> series;
      for (const FigureRun& run : runs) {
        if (run.init != scheme) continue;
        names.push_back("sigma=" + format_shortest(run.sigma));
        std::vector<double> losses;
        for (const TraceRow& r : run.trace.rows) losses.push_back(r.loss);
        series.push_back(std::move(losses));
      }
      write_svg_plot(
          (std::filesystem::path(config.out_dir) / ("fig1_" + to_string(scheme) + ".svg"))
              .string(),
          "reconstruction loss, " + to_string(scheme) + " init", names, series);
    }
  }
  return runs;
}

std::vector<FigureRun> reproduce_fig2(const ExperimentConfig& config) {
  const double sigma = config.noise_levels.empty() ? config.sigma_eta : config.noise_levels[0];
  const ModelSpec base_spec = config.to_model_spec(sigma);
  Rng dict_rng(config.seed, 0);
  const Dictionary dict = sample_dictionary(base_spec, dict_rng);

  std::filesystem::create_directories(config.out_dir);

  // one dataset, one dictionary, the init schemes compared head to head
  const std::uint64_t cell_seed = mix_seed(config.seed, 1);
  std::vector<std::future<FigureRun>> futures;
  for (const InitScheme scheme : config.init_schemes)
    futures.push_back(std::async(std::launch::async, run_cell, std::cref(config),
                                 std::cref(dict), scheme, sigma, cell_seed));
  std::vector<FigureRun> runs;
  for (auto& f : futures) runs.push_back(f.get());

  std::string csv = "iter";
  for (const FigureRun& run : runs) csv += "," + to_string(run.init);
  csv += "\n";
  const std::size_t rows = runs.empty() ? 0 : runs.front().trace.rows.size();
  for (std::size_t r = 0; r < rows; ++r) {
    csv += std::to_string(r);
    for (const FigureRun& run : runs) csv += "," + format_csv(run.trace.rows[r].frob_err);
    csv += "\n";
  }
  write_text_file((std::filesystem::path(config.out_dir) / "fig2_matched_error.csv").string(),
                  csv);

  if (config.svg) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> series;
    for (const FigureRun& run : runs) {
      names.push_back(to_string(run.init));
      std::vector<double> errs;
      for (const TraceRow& r : run.trace.rows) errs.push_back(r.frob_err);
      series.push_back(std::move(errs));
    }
    write_svg_plot((std::filesystem::path(config.out_dir) / "fig2.svg").string(),
                   "matched ||W-A||_F^2", names, series);
  }
  return runs;
}

}  // namespace sae
