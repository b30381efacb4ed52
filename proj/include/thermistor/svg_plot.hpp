#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace thermistor {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label = "h";
  std::string y_label = "error";
  std::vector<PlotSeries> series;
  /// Dashed h^1 and h^2 guide lines.
  bool slope_guides = true;
};

/// Least-squares slope of log(y) against log(x).
double fitted_slope(std::span<const double> x, std::span<const double> y);

/// Deterministic log-log SVG. Throws InvalidArgument on empty or
/// nonpositive data.
std::string render_svg(const PlotSpec& plot);

/// Renders, then writes; nothing is written if rendering fails.
void write_svg_plot(const PlotSpec& plot, const std::filesystem::path& path);

}  // namespace thermistor
