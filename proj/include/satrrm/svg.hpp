#pragma once

#include <string>
#include <utility>
#include <vector>

// Tiny static SVG charts (line + bar) for the report output. No dependencies;
// fixed canvas, linear axes, automatic ranges with padded bounds.

namespace satrrm::svg {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // x ascending
};

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series);

std::string bar_chart(const std::string& title, const std::string& y_label,
                      const std::vector<std::string>& labels,
                      const std::vector<double>& values);

}  // namespace satrrm::svg
