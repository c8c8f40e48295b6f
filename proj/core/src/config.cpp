#include "gnnrisk/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>

#include <json.hpp>

#include "gnnrisk/csv.hpp"
#include "gnnrisk/error.hpp"

namespace gnnrisk {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Experiment e) noexcept {
  switch (e) {
    case Experiment::SpectrumStudy: return "spectrum_study";
    case Experiment::SgdVsRidge: return "sgd_vs_ridge";
    case Experiment::Oversmoothing: return "oversmoothing";
    case Experiment::BoundsSweep: return "bounds_sweep";
  }
  return "unknown";
}

std::string_view to_string(DataPath p) noexcept {
  return p == DataPath::Graph ? "graph" : "spectrum";
}

std::string_view to_string(GraphModel m) noexcept {
  return m == GraphModel::Ba ? "ba" : "regular";
}

Experiment parse_experiment(std::string_view name) {
  for (auto e : {Experiment::SpectrumStudy, Experiment::SgdVsRidge, Experiment::Oversmoothing,
                 Experiment::BoundsSweep}) {
    if (name == to_string(e)) return e;
  }
  fail(ErrorKind::ConfigError, "unknown experiment '" + std::string(name) +
                                   "' (expected spectrum_study, sgd_vs_ridge, oversmoothing or "
                                   "bounds_sweep)");
}

DataPath parse_data_path(std::string_view name) {
  if (name == "graph") return DataPath::Graph;
  if (name == "spectrum") return DataPath::Spectrum;
  fail(ErrorKind::ConfigError,
       "unknown data path '" + std::string(name) + "' (expected graph or spectrum)");
}

GraphModel parse_graph_model(std::string_view name) {
  if (name == "ba") return GraphModel::Ba;
  if (name == "regular") return GraphModel::Regular;
  fail(ErrorKind::ConfigError,
       "unknown graph model '" + std::string(name) + "' (expected ba or regular)");
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::Sgd, Algorithm::Ridge, Algorithm::Ols}) {
    if (name == to_string(a)) return a;
  }
  fail(ErrorKind::ConfigError,
       "unknown algorithm '" + std::string(name) + "' (expected sgd, ridge or ols)");
}

namespace {

int parse_int(std::string_view text) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  require(ec == std::errc{} && ptr == end, ErrorKind::ConfigError,
          "layers: '" + std::string(text) + "' is not an integer");
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<int> parse_layers(std::string_view text) {
  text = trim(text);
  require(!text.empty(), ErrorKind::ConfigError, "layers: empty specification");
  std::vector<int> out;
  if (auto dots = text.find(".."); dots != std::string_view::npos) {
    const int lo = parse_int(trim(text.substr(0, dots)));
    const int hi = parse_int(trim(text.substr(dots + 2)));
    require(lo <= hi, ErrorKind::ConfigError,
            "layers: empty range '" + std::string(text) + "'");
    for (int l = lo; l <= hi; ++l) out.push_back(l);
    return out;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    out.push_back(parse_int(trim(piece)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Alignment ExperimentConfig::alignment() const {
  switch (align) {
    case Alignment::Kind::Head: return Alignment::head(alignment_width());
    case Alignment::Kind::Tail: return Alignment::tail(alignment_width());
    case Alignment::Kind::Weighted: return Alignment::weighted(align_p);
  }
  return Alignment::head(alignment_width());
}

ExperimentConfig default_config(Experiment experiment) {
  ExperimentConfig cfg;
  cfg.experiment = experiment;
  switch (experiment) {
    case Experiment::SpectrumStudy:
      cfg.data_path = DataPath::Graph;
      cfg.n = 500;
      cfg.d = 64;
      cfg.samples = 0;
      break;
    case Experiment::SgdVsRidge:
      break;
    case Experiment::Oversmoothing:
      cfg.data_path = DataPath::Graph;
      cfg.n = 300;
      cfg.d = 64;
      cfg.layers = {1, 2, 3};
      cfg.samples = 0;
      break;
    case Experiment::BoundsSweep:
      cfg.beta = 1.0;
      cfg.samples_grid = {128, 256, 512, 1024, 2048};
      break;
  }
  return cfg;
}

namespace {

[[noreturn]] void bad_type(const std::string& key, const char* expected) {
  fail(ErrorKind::ConfigError, "config key '" + key + "' must be " + expected);
}

std::size_t get_size(const json& v, const std::string& key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    bad_type(key, "a non-negative integer");
  }
  return v.get<std::size_t>();
}

double get_double(const json& v, const std::string& key) {
  if (!v.is_number()) bad_type(key, "a number");
  return v.get<double>();
}

std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) bad_type(key, "a string");
  return v.get<std::string>();
}

template <typename Parse>
auto parse_named(const json& v, const std::string& key, Parse parse) {
  const std::string text = get_string(v, key);
  try {
    return parse(text);
  } catch (const Error& e) {
    fail(ErrorKind::ConfigError, "config key '" + key + "': " + e.what());
  }
}

std::vector<double> get_double_list(const json& v, const std::string& key) {
  if (!v.is_array()) bad_type(key, "an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(get_double(x, key));
  return out;
}

std::vector<std::size_t> get_size_list(const json& v, const std::string& key) {
  if (!v.is_array()) bad_type(key, "an array of integers");
  std::vector<std::size_t> out;
  for (const auto& x : v) out.push_back(get_size(x, key));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const json&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"experiment",
       [](auto& c, const json& v, const std::string& k) {
         c.experiment = parse_named(v, k, parse_experiment);
       }},
      {"data_path",
       [](auto& c, const json& v, const std::string& k) {
         c.data_path = parse_named(v, k, parse_data_path);
       }},
      {"graph_model",
       [](auto& c, const json& v, const std::string& k) {
         c.graph_model = parse_named(v, k, parse_graph_model);
       }},
      {"n", [](auto& c, const json& v, const std::string& k) { c.n = get_size(v, k); }},
      {"d", [](auto& c, const json& v, const std::string& k) { c.d = get_size(v, k); }},
      {"ba_m", [](auto& c, const json& v, const std::string& k) { c.ba_m = get_size(v, k); }},
      {"regular_k",
       [](auto& c, const json& v, const std::string& k) { c.regular_k = get_size(v, k); }},
      {"beta", [](auto& c, const json& v, const std::string& k) { c.beta = get_double(v, k); }},
      {"layers",
       [](auto& c, const json& v, const std::string& k) {
         if (v.is_string()) {
           c.layers = parse_layers(v.get<std::string>());
         } else if (v.is_number_integer()) {
           c.layers = {v.get<int>()};
         } else if (v.is_array()) {
           c.layers.clear();
           for (const auto& x : v) {
             if (!x.is_number_integer()) bad_type(k, "a list of integers or a range like \"1..4\"");
             c.layers.push_back(x.get<int>());
           }
         } else {
           bad_type(k, "a list of integers or a range like \"1..4\"");
         }
       }},
      {"operator",
       [](auto& c, const json& v, const std::string& k) {
         c.op = parse_named(v, k, parse_operator_kind);
       }},
      {"operator_power",
       [](auto& c, const json& v, const std::string& k) {
         c.operator_power = static_cast<int>(get_size(v, k));
       }},
      {"symmetrize",
       [](auto& c, const json& v, const std::string& k) {
         if (!v.is_boolean()) bad_type(k, "a boolean");
         c.symmetrize = v.get<bool>();
       }},
      {"sigma", [](auto& c, const json& v, const std::string& k) { c.sigma = get_double(v, k); }},
      {"samples",
       [](auto& c, const json& v, const std::string& k) { c.samples = get_size(v, k); }},
      {"sgd_iterations",
       [](auto& c, const json& v, const std::string& k) { c.sgd_iterations = get_size(v, k); }},
      {"sampling",
       [](auto& c, const json& v, const std::string& k) {
         c.sampling = parse_named(v, k, parse_sampling);
       }},
      {"algorithm",
       [](auto& c, const json& v, const std::string& k) {
         c.algorithm = parse_named(v, k, parse_algorithm);
       }},
      {"gamma",
       [](auto& c, const json& v, const std::string& k) {
         if (v.is_null()) {
           c.gamma.reset();
         } else {
           c.gamma = get_double(v, k);
         }
       }},
      {"lambda",
       [](auto& c, const json& v, const std::string& k) {
         if (v.is_null()) {
           c.lambda.reset();
         } else {
           c.lambda = get_double(v, k);
         }
       }},
      {"gamma_grid",
       [](auto& c, const json& v, const std::string& k) { c.gamma_grid = get_double_list(v, k); }},
      {"lambda_grid",
       [](auto& c, const json& v, const std::string& k) {
         c.lambda_grid = get_double_list(v, k);
       }},
      {"samples_grid",
       [](auto& c, const json& v, const std::string& k) {
         c.samples_grid = get_size_list(v, k);
       }},
      {"trials",
       [](auto& c, const json& v, const std::string& k) { c.trials = get_size(v, k); }},
      {"align",
       [](auto& c, const json& v, const std::string& k) {
         c.align = parse_named(v, k, parse_alignment_kind);
       }},
      {"align_k",
       [](auto& c, const json& v, const std::string& k) { c.align_k = get_size(v, k); }},
      {"align_p",
       [](auto& c, const json& v, const std::string& k) { c.align_p = get_double(v, k); }},
      {"seed",
       [](auto& c, const json& v, const std::string& k) {
         if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
           bad_type(k, "an unsigned 64-bit integer");
         }
         c.seed = v.get<std::uint64_t>();
       }},
      {"validation_fraction",
       [](auto& c, const json& v, const std::string& k) {
         c.validation_fraction = get_double(v, k);
       }},
      {"head", [](auto& c, const json& v, const std::string& k) { c.head = get_size(v, k); }},
      {"bv_repeats",
       [](auto& c, const json& v, const std::string& k) { c.bv_repeats = get_size(v, k); }},
      {"jobs",
       [](auto& c, const json& v, const std::string& k) {
         c.jobs = static_cast<unsigned>(get_size(v, k));
       }},
  };
  return table;
}

json parse_object(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, std::string("malformed JSON config: ") + e.what());
  }
  require(doc.is_object(), ErrorKind::ConfigError, "config must be a JSON object");
  return doc;
}

void apply_object(ExperimentConfig& cfg, const json& doc) {
  const auto& table = setters();
  for (const auto& [key, value] : doc.items()) {
    auto it = std::find_if(table.begin(), table.end(),
                           [&](const auto& entry) { return entry.first == key; });
    require(it != table.end(), ErrorKind::ConfigError, "unknown config key '" + key + "'");
    it->second(cfg, value, key);
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& entry : setters()) out.push_back(entry.first);
    return out;
  }();
  return keys;
}

void apply_config_json(ExperimentConfig& cfg, std::string_view json_text) {
  apply_object(cfg, parse_object(json_text));
}

ExperimentConfig parse_config(std::string_view json_text, Experiment fallback) {
  json doc = parse_object(json_text);
  if (doc.contains("config")) {
    doc = doc["config"];
    require(doc.is_object(), ErrorKind::ConfigError, "manifest 'config' must be an object");
  }
  Experiment experiment = fallback;
  if (doc.contains("experiment")) experiment = parse_named(doc["experiment"], "experiment", parse_experiment);
  ExperimentConfig cfg = default_config(experiment);
  apply_object(cfg, doc);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, Experiment fallback) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    fail(ErrorKind::ConfigError, e.what());
  }
  return parse_config(text, fallback);
}

namespace {

void check(bool ok, const std::string& key, const std::string& what) {
  require(ok, ErrorKind::ConfigError, key + " (--" + [&] {
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    return flag;
  }() + ") " + what);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void validate(const ExperimentConfig& c) {
  check(c.trials >= 1, "trials", "must be >= 1");
  check(finite(c.validation_fraction) && c.validation_fraction > 0.0 &&
            c.validation_fraction <= 0.5,
        "validation_fraction", "must lie in (0, 0.5]");
  check(c.d >= 1, "d", "must be >= 1");
  check(c.n >= 2, "n", "must be >= 2");
  check(finite(c.sigma) && c.sigma >= 0.0, "sigma", "must be finite and >= 0");
  check(finite(c.beta) && c.beta >= 0.0, "beta", "must be finite and >= 0");
  check(!c.layers.empty(), "layers", "must not be empty");
  for (int l : c.layers) check(l >= 1 && l <= 8, "layers", "entries must lie in 1..8");
  check(c.operator_power >= 1, "operator_power", "must be >= 1");
  if (c.data_path == DataPath::Graph || c.experiment == Experiment::SpectrumStudy) {
    check(c.ba_m >= 1 && c.ba_m < c.n, "ba_m", "must lie in [1, n)");
    check(c.regular_k < c.n, "regular_k", "must be < n");
    check((c.n * c.regular_k) % 2 == 0, "regular_k", "times n must be even");
  }
  if (c.gamma) check(finite(*c.gamma) && *c.gamma > 0.0, "gamma", "must be > 0");
  if (c.lambda) check(finite(*c.lambda) && *c.lambda >= 0.0, "lambda", "must be >= 0");
  for (double g : c.gamma_grid) check(finite(g) && g > 0.0, "gamma_grid", "entries must be > 0");
  for (double l : c.lambda_grid) {
    check(finite(l) && l >= 0.0, "lambda_grid", "entries must be >= 0");
  }
  for (std::size_t s : c.samples_grid) check(s >= 2, "samples_grid", "entries must be >= 2");
  if (c.experiment == Experiment::BoundsSweep) {
    check(!c.samples_grid.empty(), "samples_grid", "must not be empty for bounds_sweep");
  }
  check(c.sgd_iterations == 0 || (c.sgd_iterations >= 2 && c.sgd_iterations % 2 == 0),
        "sgd_iterations", "must be 0 or an even number >= 2");
  check(c.samples == 0 || c.samples >= 2, "samples", "must be 0 or >= 2");
  if (c.align == Alignment::Kind::Weighted) {
    check(finite(c.align_p), "align_p", "must be finite");
  } else {
    check(c.alignment_width() >= 1 && c.alignment_width() <= c.d, "align_k", "must lie in [0, d]");
  }
  check(c.head >= 2, "head", "must be >= 2");
  check(c.bv_repeats == 0 || c.bv_repeats >= 2, "bv_repeats", "must be 0 or >= 2");
}

std::string config_to_json(const ExperimentConfig& c, int indent) {
  ordered_json out;
  out["experiment"] = to_string(c.experiment);
  out["data_path"] = to_string(c.data_path);
  out["graph_model"] = to_string(c.graph_model);
  out["n"] = c.n;
  out["d"] = c.d;
  out["ba_m"] = c.ba_m;
  out["regular_k"] = c.regular_k;
  out["beta"] = c.beta;
  out["layers"] = c.layers;
  out["operator"] = to_string(c.op);
  out["operator_power"] = c.operator_power;
  out["symmetrize"] = c.symmetrize;
  out["sigma"] = c.sigma;
  out["samples"] = c.samples;
  out["sgd_iterations"] = c.sgd_iterations;
  out["sampling"] = to_string(c.sampling);
  out["algorithm"] = to_string(c.algorithm);
  out["gamma"] = c.gamma ? ordered_json(*c.gamma) : ordered_json(nullptr);
  out["lambda"] = c.lambda ? ordered_json(*c.lambda) : ordered_json(nullptr);
  out["gamma_grid"] = c.gamma_grid;
  out["lambda_grid"] = c.lambda_grid;
  out["samples_grid"] = c.samples_grid;
  out["trials"] = c.trials;
  out["align"] = to_string(c.align);
  out["align_k"] = c.align_k;
  out["align_p"] = c.align_p;
  out["seed"] = c.seed;
  out["validation_fraction"] = c.validation_fraction;
  out["head"] = c.head;
  out["bv_repeats"] = c.bv_repeats;
  return out.dump(indent);
}

}  // namespace gnnrisk
