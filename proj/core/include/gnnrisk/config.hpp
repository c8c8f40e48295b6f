#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gnnrisk/graph.hpp"
#include "gnnrisk/learners.hpp"
#include "gnnrisk/synthesis.hpp"

namespace gnnrisk {

enum class Experiment { SpectrumStudy, SgdVsRidge, Oversmoothing, BoundsSweep };
enum class DataPath { Graph, Spectrum };
enum class GraphModel { Ba, Regular };

std::string_view to_string(Experiment e) noexcept;
std::string_view to_string(DataPath p) noexcept;
std::string_view to_string(GraphModel m) noexcept;
Experiment parse_experiment(std::string_view name);
DataPath parse_data_path(std::string_view name);
GraphModel parse_graph_model(std::string_view name);
Algorithm parse_algorithm(std::string_view name);

/// Accepts "1..4", "1,2,3" or a single integer.
std::vector<int> parse_layers(std::string_view text);

struct ExperimentConfig {
  Experiment experiment = Experiment::SgdVsRidge;
  DataPath data_path = DataPath::Spectrum;
  GraphModel graph_model = GraphModel::Ba;

  std::size_t n = 8192;  // graph vertices, or population rows on the spectrum path
  std::size_t d = 128;
  std::size_t ba_m = 3;
  std::size_t regular_k = 6;
  double beta = 2.0;
  std::vector<int> layers{1};
  OperatorKind op = OperatorKind::ShiftPsd;
  int operator_power = 1;
  bool symmetrize = false;

  double sigma = 1.0;
  std::size_t samples = 1024;       // training rows N; 0 = whole training pool
  std::size_t sgd_iterations = 0;   // 0 = N rounded down to even
  Sampling sampling = Sampling::WithReplacement;
  Algorithm algorithm = Algorithm::Sgd;  // `train` only

  std::optional<double> gamma;   // fixes the step size, bypassing the grid
  std::optional<double> lambda;  // fixes the ridge penalty
  // An empty grid selects the default one.
  std::vector<double> gamma_grid;   // default: 10 log points in [1e-3, 1] / tr(M)
  std::vector<double> lambda_grid;  // default: 13 log points in [0.1, 1000]
  std::vector<std::size_t> samples_grid;

  std::size_t trials = 5;
  Alignment::Kind align = Alignment::Kind::Head;
  std::size_t align_k = 0;  // 0 = ceil(d / 10)
  double align_p = 0.0;

  std::uint64_t seed = 0;
  double validation_fraction = 0.2;
  std::size_t head = 100;
  std::size_t bv_repeats = 8;  // 0 skips the bias/variance estimate
  unsigned jobs = 0;           // 0 = hardware concurrency; not part of the manifest

  std::size_t alignment_width() const noexcept {
    return align_k == 0 ? default_alignment_width(d) : align_k;
  }
  Alignment alignment() const;
};

ExperimentConfig default_config(Experiment experiment);

/// Overlays the keys of a JSON object onto `cfg`. Unknown keys and type
/// mismatches raise config-error. Does not validate.
void apply_config_json(ExperimentConfig& cfg, std::string_view json_text);

/// Parses a config file, or a run manifest carrying a "config" object. The
/// "experiment" key, when present, selects the defaults; otherwise
/// `fallback` does.
ExperimentConfig parse_config(std::string_view json_text, Experiment fallback);
ExperimentConfig load_config(const std::filesystem::path& path, Experiment fallback);

/// Throws config-error naming the offending key.
void validate(const ExperimentConfig& cfg);

/// Every key except `jobs`, in a fixed order.
std::string config_to_json(const ExperimentConfig& cfg, int indent = 2);

/// Known config keys, in the order config_to_json writes them.
const std::vector<std::string>& config_keys();

}  // namespace gnnrisk
