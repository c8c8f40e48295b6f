#include "gnnrisk/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "gnnrisk/csv.hpp"
#include "gnnrisk/error.hpp"
#include "gnnrisk/graph.hpp"
#include "gnnrisk/plot.hpp"
#include "gnnrisk/rng.hpp"
#include "gnnrisk/spectral.hpp"

namespace gnnrisk {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Sub-stream tags under a trial seed.
enum : std::uint64_t {
  kGraphStream = 1,
  kFeatureStream = 2,
  kSplitStream = 3,
  kPopulationStream = 4,
  kRegularStream = 5,
  kResponseStream = 10,
  kSgdStream = 20,
  kBiasVarianceStream = 30,
};

}  // namespace

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  require(lo > 0.0 && hi >= lo && count >= 1, ErrorKind::InvalidParameter,
          "log_grid: need 0 < lo <= hi and count >= 1");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_lambda_grid() { return log_grid(0.1, 1000.0, 13); }

std::vector<double> default_gamma_grid(double trace) {
  require(std::isfinite(trace) && trace > 0.0, ErrorKind::InvalidParameter,
          "default_gamma_grid: trace must be positive");
  auto grid = log_grid(1e-3, 1.0, 10);
  for (double& g : grid) g /= trace;
  return grid;
}

std::vector<double> clip_gamma_grid(std::span<const double> grid, double trace) {
  require(std::isfinite(trace) && trace > 0.0, ErrorKind::InvalidParameter,
          "clip_gamma_grid: trace must be positive");
  const double cap = 1.0 / trace;
  std::vector<double> out;
  for (double g : grid) {
    if (std::isfinite(g) && g > 0.0) out.push_back(std::min(g, cap));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

TuneResult tune_hyperparameter(const GridTrainer& train, std::span<const double> grid,
                               const AggregationDataset& validation, const GroundTruth& gt) {
  require(!grid.empty(), ErrorKind::InvalidParameter, "tune_hyperparameter: empty grid");
  TuneResult out;
  out.grid.assign(grid.begin(), grid.end());
  std::sort(out.grid.begin(), out.grid.end());
  out.risks.assign(out.grid.size(), kNaN);
  std::optional<std::size_t> best;
  std::string last_error;
  for (std::size_t i = 0; i < out.grid.size(); ++i) {
    try {
      const Estimator est = train(out.grid[i]);
      const double risk = excess_risk(est.theta, gt, validation);
      if (!std::isfinite(risk)) continue;
      out.risks[i] = risk;
      if (!best || risk < out.risks[*best]) best = i;
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  require(best.has_value(), ErrorKind::InvalidParameter,
          "tune_hyperparameter: every grid point failed" +
              (last_error.empty() ? std::string() : " (last: " + last_error + ")"));
  out.best = out.grid[*best];
  out.best_risk = out.risks[*best];
  return out;
}

DataSplit split_rows(std::size_t rows, double validation_fraction, std::size_t samples,
                     std::uint64_t seed) {
  require(validation_fraction > 0.0 && validation_fraction <= 0.5, ErrorKind::InvalidParameter,
          "split_rows: validation fraction must lie in (0, 0.5]");
  const auto n_val = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(rows))));
  require(rows > n_val, ErrorKind::InvalidParameter,
          "split_rows: " + std::to_string(rows) + " rows leave no training data");
  const std::size_t pool = rows - n_val;
  const std::size_t n_train = samples == 0 ? pool : samples;
  require(n_train <= pool, ErrorKind::InvalidParameter,
          "split_rows: N = " + std::to_string(n_train) + " exceeds the " + std::to_string(pool) +
              " training rows available");

  std::vector<std::size_t> perm(rows);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(perm));

  DataSplit split;
  split.validation.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_val));
  split.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_val),
                     perm.begin() + static_cast<std::ptrdiff_t>(n_val + n_train));
  std::sort(split.validation.begin(), split.validation.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

unsigned resolve_jobs(unsigned jobs) noexcept {
  if (jobs > 0) return jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task) {
  std::vector<std::exception_ptr> errors(count);
  auto run_one = [&](std::size_t i) {
    try {
      task(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const auto workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_jobs(jobs), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) run_one(i);
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double median(std::vector<double> values) {
  require(!values.empty(), ErrorKind::InvalidParameter, "median: no values");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

double RunReport::median_delta(Algorithm algorithm, int layers, std::size_t samples) const {
  std::vector<double> deltas;
  for (const auto& r : results) {
    if (r.algorithm == algorithm && r.layers == layers && r.samples == samples) {
      deltas.push_back(r.report.delta);
    }
  }
  return deltas.empty() ? kNaN : median(std::move(deltas));
}

namespace {

Graph make_graph(const ExperimentConfig& cfg, GraphModel model, std::uint64_t seed) {
  return model == GraphModel::Ba ? generate_ba(cfg.n, cfg.ba_m, seed)
                                 : generate_regular(cfg.n, cfg.regular_k, seed);
}

// Everything one trial needs: a fixed graph and feature matrix (or a fixed
// latent draw on the spectrum path) and theta* in the L = 1 basis.
class TrialWorld {
 public:
  TrialWorld(const ExperimentConfig& cfg, std::size_t trial)
      : cfg_(cfg), trial_(trial), seed_(derive_seed(cfg.seed, trial)) {
    if (cfg.data_path == DataPath::Graph) {
      const Graph g = make_graph(cfg, cfg.graph_model, derive_seed(seed_, kGraphStream));
      op_ = build_operator(g, cfg.op, cfg.operator_power);
      features_ = sample_features(cfg.n, cfg.d, derive_seed(seed_, kFeatureStream));
      base_ = aggregate(*op_, features_, 1, cfg.sigma);
      basis_ = base_->spectral;
    } else {
      basis_ = synthetic_spectrum(cfg.d, cfg.beta).as_decomposition();
    }
    gt_ = make_ground_truth(basis_, cfg.alignment());
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t trial() const noexcept { return trial_; }
  const GroundTruth& ground_truth() const noexcept { return gt_; }
  const SpectralDecomposition& basis() const noexcept { return basis_; }
  const std::optional<GraphOperator>& graph_operator() const noexcept { return op_; }

  AggregationDataset dataset(int layers) const {
    if (op_) {
      if (layers == 1) return *base_;
      return aggregate(*op_, features_, layers, cfg_.sigma);
    }
    return sample_from_spectrum(stack_spectrum(basis_, layers), cfg_.n, cfg_.sigma,
                                derive_seed(seed_, kPopulationStream), cfg_.symmetrize);
  }

  // Spectrum and theta* coordinates fed to the bound formulas.
  std::pair<std::vector<double>, std::vector<double>> bound_inputs(int layers) const {
    SpectralDecomposition spec;
    if (op_) {
      spec = dataset(layers).spectral;
    } else {
      spec = stack_spectrum(basis_, layers);
    }
    const Vector coords = spec.coordinates(gt_.theta_star);
    std::vector<double> mu(spec.dim());
    std::vector<double> c(spec.dim());
    for (std::size_t i = 0; i < spec.dim(); ++i) {
      mu[i] = std::max(0.0, spec.eigenvalues[static_cast<Eigen::Index>(i)]);
      c[i] = coords[static_cast<Eigen::Index>(i)];
    }
    return {mu, c};
  }

 private:
  const ExperimentConfig& cfg_;
  std::size_t trial_;
  std::uint64_t seed_;
  std::optional<GraphOperator> op_;
  FeatureMatrix features_;
  std::optional<AggregationDataset> base_;
  SpectralDecomposition basis_;
  GroundTruth gt_;
};

Vector pick(const Vector& y, std::span<const std::size_t> rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = y[static_cast<Eigen::Index>(rows[i])];
  }
  return out;
}

// One data draw at a layer count and training size, ready for fitting.
struct FitContext {
  const ExperimentConfig& cfg;
  const TrialWorld& world;
  const AggregationDataset& full;
  AggregationDataset train;
  AggregationDataset validation;
  Vector y_train;
  int layers;
  std::size_t samples;

  FitContext(const ExperimentConfig& c, const TrialWorld& w, const AggregationDataset& f,
             const Vector& y, const DataSplit& split, int l)
      : cfg(c),
        world(w),
        full(f),
        train(f.subset(split.train)),
        validation(f.subset(split.validation)),
        y_train(pick(y, split.train)),
        layers(l),
        samples(split.train.size()) {}

  std::size_t sgd_iterations() const {
    if (cfg.sgd_iterations > 0) return cfg.sgd_iterations;
    return std::max<std::size_t>(2, samples - samples % 2);
  }

  std::uint64_t sgd_seed() const {
    return derive_seed(world.seed(), kSgdStream + static_cast<std::uint64_t>(layers));
  }

  Estimator fit(Algorithm algorithm, double hyper, const Vector& y, std::uint64_t sgd_seed) const {
    switch (algorithm) {
      case Algorithm::Sgd:
        return sgd_tail_averaged(train, y,
                                 SgdConfig{hyper, sgd_iterations(), cfg.sampling, sgd_seed});
      case Algorithm::Ridge:
        return ridge_fit(train, y, RidgeConfig{hyper});
      case Algorithm::Ols:
        return ols_fit(train, y);
    }
    fail(ErrorKind::InvalidParameter, "unknown algorithm");
  }

  std::vector<double> grid(Algorithm algorithm) const {
    if (algorithm == Algorithm::Sgd) {
      const double trace = train.covariance_trace();
      std::vector<double> raw;
      if (cfg.gamma) {
        raw = {*cfg.gamma};
      } else if (!cfg.gamma_grid.empty()) {
        raw = cfg.gamma_grid;
      } else {
        raw = default_gamma_grid(trace);
      }
      auto clipped = clip_gamma_grid(raw, trace);
      require(!clipped.empty(), ErrorKind::InvalidParameter, "gamma grid is empty after clipping");
      return clipped;
    }
    if (algorithm == Algorithm::Ols) return {0.0};
    if (cfg.lambda) return {*cfg.lambda};
    return cfg.lambda_grid.empty() ? default_lambda_grid() : cfg.lambda_grid;
  }

  double tune(Algorithm algorithm) const {
    const auto values = grid(algorithm);
    if (values.size() == 1) return values.front();
    const std::uint64_t s = sgd_seed();
    return tune_hyperparameter(
               [&](double h) { return fit(algorithm, h, y_train, s); }, values, validation,
               world.ground_truth())
        .best;
  }

  TrialResult evaluate(Algorithm algorithm, double hyper) const {
    const auto start = std::chrono::steady_clock::now();
    const GroundTruth& gt = world.ground_truth();
    const Estimator est = fit(algorithm, hyper, y_train, sgd_seed());

    TrialResult r;
    r.trial = world.trial();
    r.algorithm = algorithm;
    r.hyperparameter = hyper;
    r.report = risk_report(est.theta, gt, full, std::min(cfg.alignment_width(), full.dim()));
    if (cfg.bv_repeats >= 2) {
      const std::uint64_t bv_seed =
          derive_seed(world.seed(), kBiasVarianceStream + static_cast<std::uint64_t>(layers));
      const BiasVariance bv = bias_variance_split(
          [&](std::uint64_t s) {
            const Vector y = generate_responses(train, gt, s);
            return fit(algorithm, hyper, y, derive_seed(s, kSgdStream));
          },
          full, gt, cfg.bv_repeats, bv_seed, 1);
      r.report.bias_hat = bv.bias;
      r.report.var_hat = bv.variance;
    } else {
      r.report.bias_hat = kNaN;
      r.report.var_hat = kNaN;
    }
    r.layers = layers;
    r.samples = samples;
    r.seed = world.seed();
    r.beta = cfg.data_path == DataPath::Spectrum ? cfg.beta : kNaN;
    r.wall_time = std::chrono::steady_clock::now() - start;
    return r;
  }
};

Vector responses_for(const TrialWorld& world, const AggregationDataset& full, int layers) {
  return generate_responses(
      full, world.ground_truth(),
      derive_seed(world.seed(), kResponseStream + static_cast<std::uint64_t>(layers)));
}

std::string nan_empty(double v) { return std::isnan(v) ? std::string() : format_double(v); }

void sort_results(std::vector<TrialResult>& results) {
  std::stable_sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
    return std::tie(a.trial, a.layers, a.samples, a.algorithm) <
           std::tie(b.trial, b.layers, b.samples, b.algorithm);
  });
}

std::string summary_csv(std::span<const TrialResult> results) {
  std::map<std::tuple<int, std::size_t, Algorithm>, std::vector<const TrialResult*>> groups;
  for (const auto& r : results) groups[{r.layers, r.samples, r.algorithm}].push_back(&r);
  CsvWriter csv{"algorithm", "L", "N", "trials", "median_delta", "median_bias_hat",
                "median_var_hat", "median_hyperparameter"};
  for (const auto& [key, rows] : groups) {
    std::vector<double> delta, bias, var, hyper;
    for (const auto* r : rows) {
      delta.push_back(r->report.delta);
      bias.push_back(r->report.bias_hat);
      var.push_back(r->report.var_hat);
      hyper.push_back(r->hyperparameter);
    }
    const auto& [layers, samples, algorithm] = key;
    csv.field(to_string(algorithm))
        .field(layers)
        .field(samples)
        .field(rows.size())
        .field(median(delta))
        .field(nan_empty(median(bias)))
        .field(nan_empty(median(var)))
        .field(median(hyper));
    csv.end_row();
  }
  return csv.str();
}

struct OutputSet {
  fs::path dir;
  std::vector<std::string> names;

  void write(const std::string& name, std::string_view content) {
    write_text_file(dir / name, content);
    names.push_back(name);
  }
  void plot(const std::string& name, std::span<const PlotSeries> series, const AxesConfig& axes) {
    emit_svg_plot(series, axes, dir / name);
    names.push_back(name);
  }
};

void finish(RunReport& report, OutputSet& out, std::string_view command, const ExperimentConfig& cfg) {
  report.out_dir = out.dir;
  report.manifest = write_manifest(out.dir, command, &cfg, out.names);
  std::sort(out.names.begin(), out.names.end());
  report.files = out.names;
}

void require_experiment(const ExperimentConfig& cfg, Experiment expected) {
  require(cfg.experiment == expected, ErrorKind::ConfigError,
          "config experiment is '" + std::string(to_string(cfg.experiment)) + "', expected '" +
              std::string(to_string(expected)) + "'");
  validate(cfg);
}

// Median delta per algorithm across layer counts, one series each.
std::vector<PlotSeries> delta_series(const RunReport& report, std::span<const int> layers,
                                     std::size_t samples) {
  std::vector<PlotSeries> series;
  for (Algorithm a : {Algorithm::Sgd, Algorithm::Ridge}) {
    PlotSeries s;
    s.label = std::string(to_string(a));
    for (int l : layers) {
      const double m = report.median_delta(a, l, samples);
      if (std::isnan(m)) continue;
      s.x.push_back(l);
      s.y.push_back(m);
    }
    if (!s.x.empty()) series.push_back(std::move(s));
  }
  return series;
}

std::vector<TrialResult> run_layer_trials(const ExperimentConfig& cfg,
                                          std::vector<RatioCheckRow>* ratio_rows) {
  std::vector<std::vector<TrialResult>> per_trial(cfg.trials);
  std::vector<std::vector<RatioCheckRow>> checks(cfg.trials);
  parallel_for(cfg.trials, cfg.jobs, [&](std::size_t t) {
    const TrialWorld world(cfg, t);
    for (int layers : cfg.layers) {
      const AggregationDataset full = world.dataset(layers);
      const Vector y = responses_for(world, full, layers);
      const DataSplit split = split_rows(full.rows(), cfg.validation_fraction, cfg.samples,
                                         derive_seed(world.seed(), kSplitStream));
      const FitContext ctx(cfg, world, full, y, split, layers);
      for (Algorithm a : {Algorithm::Sgd, Algorithm::Ridge}) {
        per_trial[t].push_back(ctx.evaluate(a, ctx.tune(a)));
      }
    }
    if (ratio_rows == nullptr) return;
    std::vector<double> mu;
    if (const auto& op = world.graph_operator()) {
      const SpectralDecomposition spec = eigh_symmetric(op->matrix);
      mu.assign(spec.eigenvalues.begin(), spec.eigenvalues.end());
    } else {
      mu.assign(world.basis().eigenvalues.begin(), world.basis().eigenvalues.end());
    }
    SpectralDecomposition dec;
    dec.eigenvalues = Eigen::Map<const Vector>(mu.data(), static_cast<Eigen::Index>(mu.size()));
    const std::size_t top = std::min(cfg.head, mu.size());
    for (int layers : cfg.layers) {
      RatioCheckRow row{t, layers, 0, 0};
      for (std::size_t i = 1; i < top; ++i) {
        if (!(mu[i - 1] > mu[i]) || !(mu[i] > 0.0)) continue;
        ++row.pairs;
        if (ratio_amplification_check(dec, i, i + 1, layers)) ++row.passed;
      }
      checks[t].push_back(row);
    }
  });
  std::vector<TrialResult> results;
  for (auto& rows : per_trial) results.insert(results.end(), rows.begin(), rows.end());
  sort_results(results);
  if (ratio_rows != nullptr) {
    for (auto& rows : checks) ratio_rows->insert(ratio_rows->end(), rows.begin(), rows.end());
  }
  return results;
}

}  // namespace

std::string results_csv(Experiment experiment, std::span<const TrialResult> results) {
  CsvWriter csv{"experiment", "trial", "algorithm", "hyperparameter", "delta", "bias_hat",
                "var_hat",    "L",     "beta",      "N",              "seed"};
  for (const auto& r : results) {
    csv.field(to_string(experiment))
        .field(r.trial)
        .field(to_string(r.algorithm))
        .field(r.hyperparameter)
        .field(r.report.delta)
        .field(nan_empty(r.report.bias_hat))
        .field(nan_empty(r.report.var_hat))
        .field(r.layers)
        .field(nan_empty(r.beta))
        .field(r.samples)
        .field(std::to_string(r.seed));
    csv.end_row();
  }
  return csv.str();
}

fs::path write_manifest(const fs::path& out_dir, std::string_view command,
                        const ExperimentConfig* cfg, std::vector<std::string> files,
                        std::string_view parameters_json) {
  nlohmann::ordered_json doc;
  doc["tool"] = "gnnrisk";
  doc["version"] = "0.1.0";
  doc["command"] = command;
  if (cfg != nullptr) {
    doc["experiment"] = to_string(cfg->experiment);
    doc["seed"] = cfg->seed;
    doc["config"] = nlohmann::ordered_json::parse(config_to_json(*cfg));
  }
  if (!parameters_json.empty()) doc["parameters"] = nlohmann::ordered_json::parse(parameters_json);
  std::sort(files.begin(), files.end());
  doc["outputs"] = files;
  const fs::path path = out_dir / "manifest.json";
  write_text_file(path, doc.dump(2) + "\n");
  return path;
}

RunReport run_spectrum_study(const ExperimentConfig& cfg, const fs::path& out_dir) {
  require_experiment(cfg, Experiment::SpectrumStudy);
  struct TrialSpectra {
    std::vector<double> values[2][2];  // [graph][source]
    std::vector<SpectrumFit> fits;
  };
  std::vector<TrialSpectra> trials(cfg.trials);
  const char* graph_names[2] = {"ba", "regular"};
  const char* source_names[2] = {"operator", "covariance"};

  parallel_for(cfg.trials, cfg.jobs, [&](std::size_t t) {
    const std::uint64_t seed = derive_seed(cfg.seed, t);
    const FeatureMatrix x = sample_features(cfg.n, cfg.d, derive_seed(seed, kFeatureStream));
    for (int gi = 0; gi < 2; ++gi) {
      const GraphModel model = gi == 0 ? GraphModel::Ba : GraphModel::Regular;
      const Graph g = make_graph(cfg, model, derive_seed(seed, gi == 0 ? kGraphStream : kRegularStream));
      const GraphOperator op = build_operator(g, cfg.op, cfg.operator_power);
      const SpectralDecomposition op_spec = eigh_symmetric(op.matrix);
      const AggregationDataset ds = aggregate(op, x, cfg.layers.front(), cfg.sigma);
      trials[t].values[gi][0].assign(op_spec.eigenvalues.begin(), op_spec.eigenvalues.end());
      trials[t].values[gi][1].assign(ds.spectral.eigenvalues.begin(), ds.spectral.eigenvalues.end());
      for (int si = 0; si < 2; ++si) {
        const auto& v = trials[t].values[gi][si];
        // The fit needs a positive prefix; zero or negative modes end the window.
        std::size_t positive = 0;
        while (positive < std::min(cfg.head, v.size()) && v[positive] > 0.0) ++positive;
        SpectrumFit fit;
        fit.trial = t;
        fit.graph = graph_names[gi];
        fit.source = source_names[si];
        fit.beta_hat = positive >= 2 ? fit_decay_rate(std::span(v).first(positive), cfg.head) : kNaN;
        fit.cv = coefficient_of_variation(v, cfg.head);
        trials[t].fits.push_back(fit);
      }
    }
  });

  RunReport report;
  OutputSet out{out_dir, {}};
  CsvWriter spectra{"trial", "graph", "source", "index", "eigenvalue"};
  CsvWriter fits{"trial", "graph", "source", "beta_hat", "cv", "head"};
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    for (int gi = 0; gi < 2; ++gi) {
      for (int si = 0; si < 2; ++si) {
        const auto& v = trials[t].values[gi][si];
        for (std::size_t i = 0; i < v.size(); ++i) {
          spectra.field(t).field(graph_names[gi]).field(source_names[si]).field(i + 1).field(v[i]);
          spectra.end_row();
        }
      }
    }
    for (const auto& f : trials[t].fits) {
      fits.field(t).field(f.graph).field(f.source).field(nan_empty(f.beta_hat)).field(f.cv).field(cfg.head);
      fits.end_row();
      report.spectrum_fits.push_back(f);
    }
  }
  out.write("spectra.csv", spectra.str());
  out.write("spectrum_fits.csv", fits.str());

  for (int si = 0; si < 2; ++si) {
    std::vector<PlotSeries> series;
    for (int gi = 0; gi < 2; ++gi) {
      PlotSeries s;
      s.label = graph_names[gi];
      const auto& v = trials[0].values[gi][si];
      for (std::size_t i = 0; i < v.size() && v[i] > 0.0; ++i) {
        s.x.push_back(static_cast<double>(i + 1));
        s.y.push_back(v[i]);
      }
      if (!s.x.empty()) series.push_back(std::move(s));
    }
    if (series.empty()) continue;
    AxesConfig axes;
    axes.title = std::string(source_names[si]) + " spectrum (trial 0)";
    axes.x_label = "index";
    axes.y_label = "eigenvalue";
    axes.log_x = axes.log_y = true;
    out.plot(std::string("spectrum_") + source_names[si] + ".svg", series, axes);
  }
  finish(report, out, "spectrum", cfg);
  return report;
}

RunReport run_comparison(const ExperimentConfig& cfg, const fs::path& out_dir) {
  require_experiment(cfg, Experiment::SgdVsRidge);
  RunReport report;
  report.results = run_layer_trials(cfg, nullptr);
  OutputSet out{out_dir, {}};
  out.write("results.csv", results_csv(cfg.experiment, report.results));
  out.write("summary.csv", summary_csv(report.results));

  std::vector<PlotSeries> series;
  for (Algorithm a : {Algorithm::Sgd, Algorithm::Ridge}) {
    PlotSeries s;
    s.label = std::string(to_string(a)) + " (L=" + std::to_string(cfg.layers.front()) + ")";
    for (const auto& r : report.results) {
      if (r.algorithm != a || r.layers != cfg.layers.front()) continue;
      s.x.push_back(static_cast<double>(r.trial));
      s.y.push_back(r.report.delta);
    }
    series.push_back(std::move(s));
  }
  AxesConfig axes;
  axes.title = "excess risk per trial";
  axes.x_label = "trial";
  axes.y_label = "excess risk";
  out.plot("risk_by_trial.svg", series, axes);
  finish(report, out, "compare", cfg);
  return report;
}

RunReport run_oversmoothing(const ExperimentConfig& cfg, const fs::path& out_dir) {
  require_experiment(cfg, Experiment::Oversmoothing);
  RunReport report;
  report.results = run_layer_trials(cfg, &report.ratio_checks);
  OutputSet out{out_dir, {}};
  out.write("results.csv", results_csv(cfg.experiment, report.results));
  out.write("summary.csv", summary_csv(report.results));

  CsvWriter checks{"trial", "L", "pairs", "passed"};
  for (const auto& c : report.ratio_checks) {
    checks.field(c.trial).field(c.layers).field(c.pairs).field(c.passed);
    checks.end_row();
  }
  out.write("ratio_checks.csv", checks.str());

  const std::size_t samples = report.results.empty() ? 0 : report.results.front().samples;
  auto series = delta_series(report, cfg.layers, samples);
  bool positive = true;
  for (const auto& s : series) {
    for (double y : s.y) positive = positive && y > 0.0;
  }
  AxesConfig axes;
  axes.title = "median excess risk vs layers (" + std::string(to_string(cfg.align)) + "-aligned)";
  axes.x_label = "layers";
  axes.y_label = "median excess risk";
  axes.log_y = positive;
  out.plot("delta_vs_layers.svg", series, axes);
  finish(report, out, "oversmooth", cfg);
  return report;
}

RunReport run_bounds_sweep(const ExperimentConfig& cfg, const fs::path& out_dir) {
  require_experiment(cfg, Experiment::BoundsSweep);
  const int layers = cfg.layers.front();
  std::vector<std::size_t> grid = cfg.samples_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  // Hyperparameters are tuned once, on trial 0 at N = samples, then frozen.
  double gamma = 0.0;
  double lambda = 0.0;
  {
    const TrialWorld world(cfg, 0);
    const AggregationDataset full = world.dataset(layers);
    const Vector y = responses_for(world, full, layers);
    const DataSplit split = split_rows(full.rows(), cfg.validation_fraction,
                                       cfg.samples == 0 ? grid.back() : cfg.samples,
                                       derive_seed(world.seed(), kSplitStream));
    const FitContext ctx(cfg, world, full, y, split, layers);
    gamma = ctx.tune(Algorithm::Sgd);
    lambda = ctx.tune(Algorithm::Ridge);
  }

  std::vector<std::vector<TrialResult>> per_trial(cfg.trials);
  parallel_for(cfg.trials, cfg.jobs, [&](std::size_t t) {
    const TrialWorld world(cfg, t);
    const AggregationDataset full = world.dataset(layers);
    const Vector y = responses_for(world, full, layers);
    for (std::size_t n_train : grid) {
      const DataSplit split = split_rows(full.rows(), cfg.validation_fraction, n_train,
                                         derive_seed(world.seed(), kSplitStream));
      const FitContext ctx(cfg, world, full, y, split, layers);
      per_trial[t].push_back(ctx.evaluate(Algorithm::Sgd, gamma));
      per_trial[t].push_back(ctx.evaluate(Algorithm::Ridge, lambda));
    }
  });

  RunReport report;
  for (auto& rows : per_trial) report.results.insert(report.results.end(), rows.begin(), rows.end());
  sort_results(report.results);

  const TrialWorld world0(cfg, 0);
  const auto [mu, coords] = world0.bound_inputs(layers);
  for (std::size_t n_train : grid) {
    BoundsRow sgd;
    sgd.samples = n_train;
    sgd.algorithm = Algorithm::Sgd;
    sgd.hyperparameter = gamma;
    sgd.measured_delta = report.median_delta(Algorithm::Sgd, layers, n_train);
    const SgdCutoffs cut = sgd_cutoffs(mu, n_train, gamma);
    sgd.upper = sgd_risk_bound(mu, coords, n_train, gamma, cfg.sigma, BoundSide::Upper,
                               {cut.k_star, cut.k_star, false});
    sgd.lower = sgd_risk_bound(mu, coords, n_train, gamma, cfg.sigma, BoundSide::Lower,
                               {0, 0, false});
    report.bounds.push_back(std::move(sgd));

    BoundsRow ridge;
    ridge.samples = n_train;
    ridge.algorithm = Algorithm::Ridge;
    ridge.hyperparameter = lambda;
    ridge.measured_delta = report.median_delta(Algorithm::Ridge, layers, n_train);
    const RidgeCutoff rc = ridge_cutoff(mu, n_train, lambda);
    ridge.upper = ridge_risk_bound(mu, coords, n_train, lambda, cfg.sigma, BoundSide::Upper, rc.k_star);
    if (lambda > 0.0) {
      ridge.lower = ridge_risk_bound(mu, coords, n_train, lambda, cfg.sigma, BoundSide::Lower, 0);
    } else {
      ridge.lower.side = BoundSide::Lower;
      ridge.lower.algorithm = BoundAlgorithm::Ridge;
      ridge.lower.bias = ridge.lower.variance = kNaN;
    }
    report.bounds.push_back(std::move(ridge));
  }

  OutputSet out{out_dir, {}};
  out.write("results.csv", results_csv(cfg.experiment, report.results));
  out.write("summary.csv", summary_csv(report.results));
  CsvWriter csv{"N",           "algorithm",      "hyperparameter", "measured_delta",
                "upper_bias",  "upper_variance", "upper_total",    "lower_bias",
                "lower_variance", "lower_total", "k_star",         "k_dagger",
                "lambda_hat"};
  for (const auto& b : report.bounds) {
    csv.field(b.samples)
        .field(to_string(b.algorithm))
        .field(b.hyperparameter)
        .field(b.measured_delta)
        .field(b.upper.bias)
        .field(b.upper.variance)
        .field(b.upper.total())
        .field(b.lower.bias)
        .field(b.lower.variance)
        .field(b.lower.total())
        .field(b.upper.cutoffs.k_star);
    if (b.algorithm == Algorithm::Sgd) {
      csv.field(b.upper.cutoffs.k_dagger).empty_field();
    } else {
      csv.empty_field().field(b.upper.cutoffs.lambda_hat);
    }
    csv.end_row();
  }
  out.write("bounds.csv", csv.str());

  std::vector<PlotSeries> series;
  for (Algorithm a : {Algorithm::Sgd, Algorithm::Ridge}) {
    PlotSeries measured{std::string(to_string(a)) + " measured", {}, {}};
    PlotSeries upper{std::string(to_string(a)) + " upper", {}, {}};
    PlotSeries lower{std::string(to_string(a)) + " lower", {}, {}};
    for (const auto& b : report.bounds) {
      if (b.algorithm != a) continue;
      const double x = static_cast<double>(b.samples);
      if (b.measured_delta > 0.0) {
        measured.x.push_back(x);
        measured.y.push_back(b.measured_delta);
      }
      if (b.upper.total() > 0.0) {
        upper.x.push_back(x);
        upper.y.push_back(b.upper.total());
      }
      if (b.lower.total() > 0.0) {
        lower.x.push_back(x);
        lower.y.push_back(b.lower.total());
      }
    }
    for (auto* s : {&measured, &upper, &lower}) {
      if (!s->x.empty()) series.push_back(std::move(*s));
    }
  }
  if (!series.empty()) {
    AxesConfig axes;
    axes.title = "excess risk and bound shapes vs N";
    axes.x_label = "N";
    axes.y_label = "excess risk";
    axes.log_x = axes.log_y = true;
    out.plot("bounds.svg", series, axes);
  }
  finish(report, out, "bounds", cfg);
  return report;
}

RunReport run_training(const ExperimentConfig& cfg, const fs::path& out_dir) {
  validate(cfg);
  const int layers = cfg.layers.front();
  const TrialWorld world(cfg, 0);
  const AggregationDataset full = world.dataset(layers);
  const Vector y = responses_for(world, full, layers);
  const DataSplit split = split_rows(full.rows(), cfg.validation_fraction, cfg.samples,
                                     derive_seed(world.seed(), kSplitStream));
  const FitContext ctx(cfg, world, full, y, split, layers);
  const double hyper = ctx.tune(cfg.algorithm);
  const Estimator est = ctx.fit(cfg.algorithm, hyper, ctx.y_train, ctx.sgd_seed());

  RunReport report;
  report.results.push_back(ctx.evaluate(cfg.algorithm, hyper));
  OutputSet out{out_dir, {}};
  out.write("estimator.json", estimator_to_json(est));
  out.write("risk.csv", risk_report_csv(report.results.front().report));
  out.write("results.csv", results_csv(cfg.experiment, report.results));
  finish(report, out, "train", cfg);
  return report;
}

RunReport run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir) {
  switch (cfg.experiment) {
    case Experiment::SpectrumStudy: return run_spectrum_study(cfg, out_dir);
    case Experiment::SgdVsRidge: return run_comparison(cfg, out_dir);
    case Experiment::Oversmoothing: return run_oversmoothing(cfg, out_dir);
    case Experiment::BoundsSweep: return run_bounds_sweep(cfg, out_dir);
  }
  fail(ErrorKind::ConfigError, "unknown experiment");
}

}  // namespace gnnrisk
