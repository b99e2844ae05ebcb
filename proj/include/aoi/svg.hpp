#pragma once

#include <string>
#include <vector>

namespace aoi::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct ChartOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  int width = 720;
  int height = 420;
};

/// Standalone SVG document with one polyline per series. Non-finite points
/// (and non-positive x on a log axis) are skipped.
std::string line_chart(const std::vector<Series>& series, const ChartOptions& options);

} // namespace aoi::svg
