#include "gnnrisk/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gnnrisk/csv.hpp"
#include "gnnrisk/error.hpp"

namespace gnnrisk {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 55.0;

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0.0;  // in transformed units
  double hi = 1.0;

  double transform(double v) const { return log ? std::log10(v) : v; }
};

Axis make_axis(std::span<const PlotSeries> series, bool use_x, bool log) {
  Axis axis;
  axis.log = log;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& s : series) {
    for (double v : use_x ? s.x : s.y) {
      const double t = axis.transform(v);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  }
  if (hi - lo <= 0.0) {
    const double pad = std::max(1.0, std::abs(lo)) * 0.5;
    lo -= pad;
    hi += pad;
  }
  axis.lo = lo;
  axis.hi = hi;
  return axis;
}

std::vector<double> ticks(const Axis& axis) {
  std::vector<double> out;
  if (axis.log) {
    for (double e = std::ceil(axis.lo); e <= std::floor(axis.hi) + 1e-9; e += 1.0) {
      out.push_back(e);
    }
    if (out.size() >= 2) return out;
    out.clear();
  }
  const double span = axis.hi - axis.lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    step = mult * mag;
    if (span / step <= 6.0) break;
  }
  for (double t = std::ceil(axis.lo / step) * step; t <= axis.hi + 1e-9 * span; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

}  // namespace

std::string render_svg_plot(std::span<const PlotSeries> series, const AxesConfig& axes) {
  require(!series.empty(), ErrorKind::InvalidParameter, "plot: no series");
  for (const auto& s : series) {
    require(!s.x.empty() && s.x.size() == s.y.size(), ErrorKind::InvalidParameter,
            "plot: series '" + s.label + "' is empty or has mismatched x/y lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      require(std::isfinite(s.x[i]) && std::isfinite(s.y[i]), ErrorKind::InvalidParameter,
              "plot: series '" + s.label + "' has a non-finite value");
      require(!axes.log_x || s.x[i] > 0.0, ErrorKind::InvalidParameter,
              "plot: log x-axis needs positive x values (series '" + s.label + "')");
      require(!axes.log_y || s.y[i] > 0.0, ErrorKind::InvalidParameter,
              "plot: log y-axis needs positive y values (series '" + s.label + "')");
    }
  }
  require(axes.width > 0 && axes.height > 0, ErrorKind::InvalidParameter,
          "plot: canvas size must be positive");

  const Axis xa = make_axis(series, true, axes.log_x);
  const Axis ya = make_axis(series, false, axes.log_y);
  const double w = axes.width;
  const double h = axes.height;
  const double plot_w = std::max(1.0, w - kMarginLeft - kMarginRight);
  const double plot_h = std::max(1.0, h - kMarginTop - kMarginBottom);
  auto px = [&](double v) { return kMarginLeft + (xa.transform(v) - xa.lo) / (xa.hi - xa.lo) * plot_w; };
  auto py = [&](double v) { return kMarginTop + (ya.hi - ya.transform(v)) / (ya.hi - ya.lo) * plot_h; };
  auto px_t = [&](double t) { return kMarginLeft + (t - xa.lo) / (xa.hi - xa.lo) * plot_w; };
  auto py_t = [&](double t) { return kMarginTop + (ya.hi - t) / (ya.hi - ya.lo) * plot_h; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(axes.width) +
         "\" height=\"" + std::to_string(axes.height) + "\" viewBox=\"0 0 " +
         std::to_string(axes.width) + " " + std::to_string(axes.height) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!axes.title.empty()) {
    svg += "<text x=\"" + fixed(kMarginLeft + plot_w / 2) +
           "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(axes.title) +
           "</text>\n";
  }

  svg += "<g class=\"axes\" stroke=\"#333\" fill=\"none\">\n";
  svg += "<rect x=\"" + fixed(kMarginLeft) + "\" y=\"" + fixed(kMarginTop) + "\" width=\"" +
         fixed(plot_w) + "\" height=\"" + fixed(plot_h) + "\"/>\n";
  svg += "</g>\n<g class=\"ticks\" fill=\"#333\">\n";
  for (double t : ticks(xa)) {
    const double x = px_t(t);
    const double label = xa.log ? std::pow(10.0, t) : t;
    svg += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(kMarginTop + plot_h) + "\" x2=\"" +
           fixed(x) + "\" y2=\"" + fixed(kMarginTop + plot_h + 5) + "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + fixed(x) + "\" y=\"" + fixed(kMarginTop + plot_h + 18) +
           "\" text-anchor=\"middle\">" + tick_label(label) + "</text>\n";
  }
  for (double t : ticks(ya)) {
    const double y = py_t(t);
    const double label = ya.log ? std::pow(10.0, t) : t;
    svg += "<line x1=\"" + fixed(kMarginLeft - 5) + "\" y1=\"" + fixed(y) + "\" x2=\"" +
           fixed(kMarginLeft) + "\" y2=\"" + fixed(y) + "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + fixed(kMarginLeft - 8) + "\" y=\"" + fixed(y + 4) +
           "\" text-anchor=\"end\">" + tick_label(label) + "</text>\n";
  }
  svg += "</g>\n";
  if (!axes.x_label.empty()) {
    svg += "<text x=\"" + fixed(kMarginLeft + plot_w / 2) + "\" y=\"" + fixed(h - 12) +
           "\" text-anchor=\"middle\">" + escape(axes.x_label) + "</text>\n";
  }
  if (!axes.y_label.empty()) {
    const std::string cy = fixed(kMarginTop + plot_h / 2);
    svg += "<text x=\"16\" y=\"" + cy + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           cy + ")\">" + escape(axes.y_label) + "</text>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kPalette.size()];
    svg += "<polyline class=\"series\" fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (i > 0) svg += ' ';
      svg += fixed(px(series[s].x[i])) + "," + fixed(py(series[s].y[i]));
    }
    svg += "\"/>\n";
  }

  svg += "<g class=\"legend\">\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = kMarginTop + 10 + 16.0 * static_cast<double>(s);
    const double x = kMarginLeft + plot_w + 12;
    svg += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(x + 20) +
           "\" y2=\"" + fixed(y) + "\" stroke=\"" + kPalette[s % kPalette.size()] +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fixed(x + 26) + "\" y=\"" + fixed(y + 4) + "\">" +
           escape(series[s].label) + "</text>\n";
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

void emit_svg_plot(std::span<const PlotSeries> series, const AxesConfig& axes,
                   const std::filesystem::path& path) {
  write_text_file(path, render_svg_plot(series, axes));
}

}  // namespace gnnrisk
