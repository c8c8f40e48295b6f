#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gnnrisk/bounds.hpp"
#include "gnnrisk/config.hpp"
#include "gnnrisk/learners.hpp"
#include "gnnrisk/risk.hpp"
#include "gnnrisk/synthesis.hpp"

namespace gnnrisk {

/// `count` log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);
std::vector<double> default_lambda_grid();
std::vector<double> default_gamma_grid(double trace);
/// Drops non-positive entries, caps the rest at 1/trace, sorts and dedupes.
std::vector<double> clip_gamma_grid(std::span<const double> grid, double trace);

using GridTrainer = std::function<Estimator(double)>;

struct TuneResult {
  double best = 0.0;
  double best_risk = 0.0;
  std::vector<double> risks;  // per sorted grid value, NaN where training failed
  std::vector<double> grid;   // sorted ascending
};

/// Minimizes excess risk on `validation` over the grid. Ties go to the
/// smaller value; grid points whose trainer throws are skipped.
TuneResult tune_hyperparameter(const GridTrainer& train, std::span<const double> grid,
                               const AggregationDataset& validation, const GroundTruth& gt);

struct DataSplit {
  std::vector<std::size_t> train;       // sorted
  std::vector<std::size_t> validation;  // sorted, disjoint from train
};

/// Shuffles 0..rows-1, takes round(fraction * rows) rows for validation and
/// the first `samples` of the remainder for training (0 = all of it). For a
/// fixed seed the training sets are nested in `samples`.
DataSplit split_rows(std::size_t rows, double validation_fraction, std::size_t samples,
                     std::uint64_t seed);

unsigned resolve_jobs(unsigned jobs) noexcept;

/// Runs task(0..count-1) on up to `jobs` threads. The exception of the
/// lowest failing index is rethrown.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& task);

double median(std::vector<double> values);

struct TrialResult {
  std::size_t trial = 0;
  Algorithm algorithm = Algorithm::Sgd;
  double hyperparameter = 0.0;
  RiskReport report;
  int layers = 1;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  double beta = 0.0;  // NaN on the graph path
  std::chrono::duration<double> wall_time{0};  // kept out of every output file
};

struct SpectrumFit {
  std::size_t trial = 0;
  std::string graph;   // "ba" | "regular"
  std::string source;  // "operator" | "covariance"
  double beta_hat = 0.0;
  double cv = 0.0;  // coefficient of variation over the head
};

struct RatioCheckRow {
  std::size_t trial = 0;
  int layers = 1;
  std::size_t pairs = 0;
  std::size_t passed = 0;
};

struct BoundsRow {
  std::size_t samples = 0;
  Algorithm algorithm = Algorithm::Sgd;
  double hyperparameter = 0.0;
  double measured_delta = 0.0;  // median over trials
  BoundProfile upper;
  BoundProfile lower;
};

struct RunReport {
  std::filesystem::path out_dir;
  std::filesystem::path manifest;
  std::vector<std::string> files;  // relative to out_dir, sorted
  std::vector<TrialResult> results;
  std::vector<SpectrumFit> spectrum_fits;
  std::vector<RatioCheckRow> ratio_checks;
  std::vector<BoundsRow> bounds;

  /// NaN when no trial matches.
  double median_delta(Algorithm algorithm, int layers, std::size_t samples) const;
};

/// BA and regular graphs at matched n and mean degree: operator and
/// covariance spectra, fitted decay rates and dispersion.
RunReport run_spectrum_study(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
/// Tuned SGD against tuned Ridge per trial and layer count.
RunReport run_comparison(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
/// Excess risk against layer count with theta* fixed in the L = 1 basis.
RunReport run_oversmoothing(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
/// Measured risk and bound profiles over a grid of N, hyperparameters tuned once.
RunReport run_bounds_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
/// Single fit of cfg.algorithm on trial 0 data.
RunReport run_training(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);
/// Dispatches on cfg.experiment.
RunReport run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Writes out_dir/manifest.json: command, config (if any), extra
/// parameters and the sorted output list. Returns its path.
std::filesystem::path write_manifest(const std::filesystem::path& out_dir,
                                     std::string_view command, const ExperimentConfig* cfg,
                                     std::vector<std::string> files,
                                     std::string_view parameters_json = {});

/// Header "experiment,trial,algorithm,hyperparameter,delta,bias_hat,var_hat,L,beta,N,seed".
std::string results_csv(Experiment experiment, std::span<const TrialResult> results);

}  // namespace gnnrisk
