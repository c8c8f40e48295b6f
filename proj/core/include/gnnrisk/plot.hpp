#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gnnrisk {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct AxesConfig {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  int width = 640;
  int height = 420;
};

/// Standalone SVG line chart: one <polyline> per series, axis ticks and a
/// legend. Output bytes depend only on the inputs.
std::string render_svg_plot(std::span<const PlotSeries> series, const AxesConfig& axes);

void emit_svg_plot(std::span<const PlotSeries> series, const AxesConfig& axes,
                   const std::filesystem::path& path);

}  // namespace gnnrisk
