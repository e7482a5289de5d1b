#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fth::cli {

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
};

struct BarChart {
  std::string title;
  std::string y_label;
  std::vector<std::string> categories;
  std::vector<std::string> groups;     // one bar per group inside each category
  std::vector<std::vector<double>> values;  // [group][category]
};

std::string render_svg(const LineChart& chart);
std::string render_svg(const BarChart& chart);

}  // namespace fth::cli
