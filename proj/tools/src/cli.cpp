#include "gnnrisk/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "gnnrisk/config.hpp"
#include "gnnrisk/csv.hpp"
#include "gnnrisk/error.hpp"
#include "gnnrisk/graph.hpp"
#include "gnnrisk/harness.hpp"
#include "gnnrisk/plot.hpp"
#include "gnnrisk/spectral.hpp"

namespace gnnrisk {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string to_flag(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::uint64_t value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  require(!text.empty() && ec == std::errc{} && ptr == end, ErrorKind::UsageError,
          what + ": '" + text + "' is not an unsigned 64-bit integer");
  return value;
}

// The JSON value a flag string stands for, typed after the key's default.
json flag_value(const std::string& key, const json& default_value, const std::string& text) {
  const std::string flag = "--" + to_flag(key);
  if (key == "layers" || default_value.is_string()) return text;
  if (default_value.is_boolean()) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    fail(ErrorKind::UsageError, flag + ": expected true or false, got '" + text + "'");
  }
  auto number = [&](const std::string& piece) {
    json v = json::parse(piece, nullptr, false);
    require(!v.is_discarded() && v.is_number(), ErrorKind::UsageError,
            flag + ": expected a number, got '" + piece + "'");
    return v;
  };
  if (default_value.is_array()) {
    json out = json::array();
    std::size_t start = 0;
    while (start < text.size()) {
      const auto comma = text.find(',', start);
      const auto piece = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      out.push_back(number(piece));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  }
  return number(text);
}

std::string display_default(const json& v) {
  if (v.is_null()) return "unset";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    if (v.empty()) return "default grid";
    std::string out;
    for (const auto& x : v) {
      if (!out.empty()) out += ',';
      out += x.dump();
    }
    return out;
  }
  return v.dump();
}

struct KeyOption {
  std::string key;
  std::string value;
  CLI::Option* option = nullptr;
};

struct CommandState {
  std::string name;
  std::optional<Experiment> experiment;  // runs of this experiment only
  Experiment defaults_from = Experiment::SgdVsRidge;
  CLI::App* app = nullptr;
  std::string config_path;
  std::string out_dir;
  std::string seed;
  unsigned jobs = 0;
  CLI::Option* seed_option = nullptr;
  CLI::Option* jobs_option = nullptr;
  std::vector<std::unique_ptr<KeyOption>> keys;
};

void add_common(CommandState& s) {
  s.out_dir = "gnnrisk-out/" + s.name;
  s.app->add_option("--config", s.config_path, "JSON config file or a previous run manifest");
  s.app->add_option("--out", s.out_dir, "output directory, created if absent")
      ->capture_default_str();
  s.seed_option = s.app->add_option("--seed", s.seed, "master seed (default: $SRL_SEED, else 0)");
  s.jobs_option = s.app->add_option("--jobs", s.jobs, "concurrent trials, 0 = all logical cores")
                      ->capture_default_str();
}

void add_keys(CommandState& s, const std::vector<std::string>& keys) {
  const json defaults = json::parse(config_to_json(default_config(s.defaults_from)));
  for (const auto& key : keys) {
    auto opt = std::make_unique<KeyOption>();
    opt->key = key;
    opt->option = s.app->add_option("--" + to_flag(key), opt->value, "config key " + key)
                      ->default_str(display_default(defaults.at(key)));
    s.keys.push_back(std::move(opt));
  }
}

std::vector<std::string> experiment_keys() {
  std::vector<std::string> out;
  for (const auto& key : config_keys()) {
    if (key != "experiment" && key != "seed" && key != "jobs") out.push_back(key);
  }
  return out;
}

ExperimentConfig resolve_config(const CommandState& s) {
  ExperimentConfig cfg = default_config(s.defaults_from);
  if (const char* env = std::getenv("SRL_SEED"); env != nullptr && *env != '\0') {
    cfg.seed = parse_u64(env, "SRL_SEED");
  }
  if (!s.config_path.empty()) {
    std::string text;
    try {
      text = read_text_file(s.config_path);
    } catch (const Error& e) {
      fail(ErrorKind::ConfigError, e.what());
    }
    json doc = json::parse(text, nullptr, false);
    require(!doc.is_discarded() && doc.is_object(), ErrorKind::ConfigError,
            "--config " + s.config_path + ": not a JSON object");
    if (doc.contains("config")) doc = doc["config"];
    if (s.experiment && doc.contains("experiment")) {
      require(doc["experiment"] == std::string(to_string(*s.experiment)), ErrorKind::ConfigError,
              "--config " + s.config_path + " describes experiment " + doc["experiment"].dump() +
                  ", but '" + s.name + "' runs " + std::string(to_string(*s.experiment)));
    }
    if (!s.experiment) doc.erase("experiment");
    apply_config_json(cfg, doc.dump());
  }
  const json defaults = json::parse(config_to_json(default_config(s.defaults_from)));
  json patch = json::object();
  for (const auto& k : s.keys) {
    if (k->option->count() > 0) patch[k->key] = flag_value(k->key, defaults.at(k->key), k->value);
  }
  if (s.seed_option->count() > 0) patch["seed"] = parse_u64(s.seed, "--seed");
  if (!patch.empty()) apply_config_json(cfg, patch.dump());
  if (s.jobs_option->count() > 0) cfg.jobs = s.jobs;
  if (s.experiment) cfg.experiment = *s.experiment;
  validate(cfg);
  return cfg;
}

void report_run(const RunReport& report, std::ostream& out) {
  for (const auto& f : report.files) out << (report.out_dir / f).string() << '\n';
  out << report.manifest.string() << '\n';
}

RunReport run_gen_graph(const ExperimentConfig& cfg, const fs::path& out_dir) {
  const Graph g = cfg.graph_model == GraphModel::Ba ? generate_ba(cfg.n, cfg.ba_m, cfg.seed)
                                                    : generate_regular(cfg.n, cfg.regular_k, cfg.seed);
  const GraphOperator op = build_operator(g, cfg.op, cfg.operator_power);
  const SpectralDecomposition spec = eigh_symmetric(op.matrix);
  save_graph(g, out_dir / "graph.json");
  write_text_file(out_dir / "operator_spectrum.csv",
                  spectrum_to_csv(std::span(spec.eigenvalues.data(), spec.dim())));

  nlohmann::ordered_json params;
  params["graph_model"] = to_string(cfg.graph_model);
  params["n"] = cfg.n;
  params["ba_m"] = cfg.ba_m;
  params["regular_k"] = cfg.regular_k;
  params["operator"] = to_string(cfg.op);
  params["operator_power"] = cfg.operator_power;
  params["seed"] = cfg.seed;
  RunReport report;
  report.out_dir = out_dir;
  report.files = {"graph.json", "operator_spectrum.csv"};
  report.manifest = write_manifest(out_dir, "gen-graph", nullptr, report.files, params.dump());
  return report;
}

struct PlotOptions {
  std::string input;
  std::string x;
  std::string y;
  std::string group;
  std::string title;
  std::string name = "plot.svg";
  bool log_x = false;
  bool log_y = false;
};

double parse_cell(const std::string& text, const std::string& column) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  require(!text.empty() && ec == std::errc{} && ptr == end, ErrorKind::InvalidParameter,
          "plot: column '" + column + "' has non-numeric value '" + text + "'");
  return value;
}

RunReport run_plot(const PlotOptions& p, const fs::path& out_dir) {
  const CsvTable table = parse_csv(read_text_file(p.input));
  const std::size_t xi = table.column(p.x);
  const std::size_t yi = table.column(p.y);
  const std::optional<std::size_t> gi =
      p.group.empty() ? std::nullopt : std::optional<std::size_t>(table.column(p.group));

  std::vector<PlotSeries> series;
  std::map<std::string, std::size_t> index;
  for (const auto& row : table.rows) {
    const std::string label = gi ? row[*gi] : p.y;
    auto [it, inserted] = index.emplace(label, series.size());
    if (inserted) series.push_back(PlotSeries{label, {}, {}});
    series[it->second].x.push_back(parse_cell(row[xi], p.x));
    series[it->second].y.push_back(parse_cell(row[yi], p.y));
  }
  AxesConfig axes;
  axes.title = p.title;
  axes.x_label = p.x;
  axes.y_label = p.y;
  axes.log_x = p.log_x;
  axes.log_y = p.log_y;
  emit_svg_plot(series, axes, out_dir / p.name);

  nlohmann::ordered_json params;
  params["input"] = p.input;
  params["x"] = p.x;
  params["y"] = p.y;
  params["group"] = p.group;
  params["log_x"] = p.log_x;
  params["log_y"] = p.log_y;
  RunReport report;
  report.out_dir = out_dir;
  report.files = {p.name};
  report.manifest = write_manifest(out_dir, "plot", nullptr, report.files, params.dump());
  return report;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Excess-risk experiments for linear GNNs: SGD against Ridge on graph aggregations",
               "gnnrisk"};
  app.require_subcommand(1);

  struct Spec {
    const char* name;
    const char* help;
    std::optional<Experiment> experiment;
    Experiment defaults_from;
  };
  const std::vector<Spec> specs = {
      {"gen-graph", "generate a BA or regular graph and its operator spectrum", std::nullopt,
       Experiment::SpectrumStudy},
      {"spectrum", "BA vs regular operator and covariance spectra", Experiment::SpectrumStudy,
       Experiment::SpectrumStudy},
      {"train", "fit one estimator on trial-0 data", std::nullopt, Experiment::SgdVsRidge},
      {"compare", "tuned SGD against tuned Ridge over trials", Experiment::SgdVsRidge,
       Experiment::SgdVsRidge},
      {"oversmooth", "excess risk against layer count", Experiment::Oversmoothing,
       Experiment::Oversmoothing},
      {"bounds", "measured risk and bound shapes over N", Experiment::BoundsSweep,
       Experiment::BoundsSweep},
  };

  std::vector<std::unique_ptr<CommandState>> states;
  for (const auto& spec : specs) {
    auto s = std::make_unique<CommandState>();
    s->name = spec.name;
    s->experiment = spec.experiment;
    s->defaults_from = spec.defaults_from;
    s->app = app.add_subcommand(spec.name, spec.help);
    add_common(*s);
    if (s->name == "gen-graph") {
      add_keys(*s, {"graph_model", "n", "ba_m", "regular_k", "operator", "operator_power"});
    } else {
      add_keys(*s, experiment_keys());
    }
    states.push_back(std::move(s));
  }

  PlotOptions plot;
  std::string plot_out = "gnnrisk-out/plot";
  CLI::App* plot_app = app.add_subcommand("plot", "render a CSV as an SVG line chart");
  plot_app->add_option("--input", plot.input, "CSV file")->required();
  plot_app->add_option("--x", plot.x, "x column")->required();
  plot_app->add_option("--y", plot.y, "y column")->required();
  plot_app->add_option("--group", plot.group, "column splitting rows into series");
  plot_app->add_option("--title", plot.title, "chart title");
  plot_app->add_option("--name", plot.name, "file name inside --out")->capture_default_str();
  plot_app->add_option("--out", plot_out, "output directory, created if absent")
      ->capture_default_str();
  plot_app->add_flag("--log-x", plot.log_x, "logarithmic x axis");
  plot_app->add_flag("--log-y", plot.log_y, "logarithmic y axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUserError;
  }

  if (plot_app->parsed()) {
    report_run(run_plot(plot, plot_out), out);
    return kExitOk;
  }
  for (const auto& s : states) {
    if (!s->app->parsed()) continue;
    const ExperimentConfig cfg = resolve_config(*s);
    const fs::path dir = s->out_dir;
    RunReport report;
    if (s->name == "gen-graph") {
      report = run_gen_graph(cfg, dir);
    } else if (s->name == "train") {
      report = run_training(cfg, dir);
    } else {
      report = run_experiment(cfg, dir);
    }
    report_run(report, out);
    return kExitOk;
  }
  fail(ErrorKind::UsageError, "no subcommand given");
}

}  // namespace

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    return run(argc, argv, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternalError;
  } catch (...) {
    err << "internal error: unknown exception\n";
    return kExitInternalError;
  }
}

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace gnnrisk
