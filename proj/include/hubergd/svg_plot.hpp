#pragma once

#include <string>
#include <vector>

namespace hubergd {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;  // empty picks from the built-in palette
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = true;
  int width = 640;
  int height = 420;
};

/// SVG 1.1 line plot. Points that are non-finite, or non-positive on a log
/// axis, split the polyline. Output depends only on the inputs.
std::string render_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace hubergd
