#include "thermistor/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "thermistor/exceptions.hpp"

namespace thermistor {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 200.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

double fitted_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("slope fit needs at least two points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::string render_svg(const PlotSpec& plot) {
  if (plot.series.empty()) throw InvalidArgument("plot has no series");
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : plot.series) {
    if (s.x.empty() || s.x.size() != s.y.size()) {
      throw InvalidArgument(fmt::format("series '{}' is empty or ragged", s.label));
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        throw InvalidArgument(fmt::format("series '{}' has a nonpositive point", s.label));
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  // Whole decades around the data.
  const double lx0 = std::floor(std::log10(xmin) - 1e-9);
  const double lx1 = std::max(std::ceil(std::log10(xmax) + 1e-9), lx0 + 1);
  const double ly0 = std::floor(std::log10(ymin) - 1e-9);
  const double ly1 = std::max(std::ceil(std::log10(ymax) + 1e-9), ly0 + 1);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (std::log10(x) - lx0) / (lx1 - lx0) * pw; };
  const auto py = [&](double y) { return kTop + (ly1 - std::log10(y)) / (ly1 - ly0) * ph; };

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
      kWidth, kHeight, kWidth, kHeight);
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += fmt::format("<text x=\"{:.2f}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" "
                     "text-anchor=\"middle\">{}</text>\n",
                     kLeft + pw / 2, escape(plot.title));
  svg += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" "
                     "stroke=\"black\"/>\n",
                     kLeft, kTop, pw, ph);
  for (int d = static_cast<int>(lx0); d <= static_cast<int>(lx1); ++d) {
    const double x = px(std::pow(10.0, d));
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#ddd\"/>\n",
                       x, kTop, kTop + ph);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
                       "text-anchor=\"middle\">1e{}</text>\n",
                       x, kTop + ph + 16, d);
  }
  for (int d = static_cast<int>(ly0); d <= static_cast<int>(ly1); ++d) {
    const double y = py(std::pow(10.0, d));
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>\n",
                       kLeft, y, kLeft + pw);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" "
                       "text-anchor=\"end\">1e{}</text>\n",
                       kLeft - 6, y + 4, d);
  }
  svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"13\" "
                     "text-anchor=\"middle\">{}</text>\n",
                     kLeft + pw / 2, kHeight - 18, escape(plot.x_label));
  svg += fmt::format("<text x=\"18\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"13\" "
                     "text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2f})\">{}</text>\n",
                     kTop + ph / 2, kTop + ph / 2, escape(plot.y_label));

  double legend_y = kTop + 10;
  const double legend_x = kLeft + pw + 14;
  if (plot.slope_guides) {
    // Guides start at the first point of the first series.
    const double y_anchor = plot.series.front().y.front();
    const double x_anchor = plot.series.front().x.front();
    for (int order : {1, 2}) {
      const double y_end = y_anchor * std::pow(xmin / x_anchor, order);
      svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"gray\" "
                         "stroke-dasharray=\"{}\"/>\n",
                         px(x_anchor), py(y_anchor), px(xmin),
                         py(std::max(y_end, std::pow(10.0, ly0))) ,
                         order == 1 ? "6,4" : "2,3");
      svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"gray\" "
                         "stroke-dasharray=\"{}\"/>\n",
                         legend_x, legend_y, legend_x + 24, legend_y, order == 1 ? "6,4" : "2,3");
      svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\">"
                         "h^{}</text>\n",
                         legend_x + 30, legend_y + 4, order);
      legend_y += 18;
    }
  }

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      points += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", px(s.x[i]), py(s.y[i]));
    }
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\" points=\"{}\"/>\n", color, points);
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", px(s.x[i]), py(s.y[i]), color);
    }
    const std::string slope =
        s.x.size() >= 2 ? fmt::format("slope {:.2f}", fitted_slope(s.x, s.y)) : std::string("slope n/a");
    svg += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" "
                       "stroke-width=\"2\"/>\n",
                       legend_x, legend_y, legend_x + 24, legend_y, color);
    svg += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\">"
                       "{} ({})</text>\n",
                       legend_x + 30, legend_y + 4, escape(s.label), slope);
    legend_y += 18;
  }
  svg += "</svg>\n";
  return svg;
}

void write_svg_plot(const PlotSpec& plot, const std::filesystem::path& path) {
  const std::string svg = render_svg(plot);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << svg)) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
}

}  // namespace thermistor
