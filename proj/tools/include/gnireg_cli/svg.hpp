#pragma once

#include <string>
#include <vector>

namespace gnireg::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Polyline chart with linear axes; non-finite points are skipped.
std::string line_plot(const std::vector<Series>& series, const std::string& title,
                      const std::string& x_label, const std::string& y_label);

// One rect per cell, rows drawn bottom-up (row 0 at the bottom). Values are
// mapped linearly from [lo, hi] onto a white-to-dark ramp.
std::string heatmap(const std::vector<std::vector<double>>& rows,
                    const std::vector<std::string>& row_labels, const std::string& title,
                    const std::string& x_label, const std::string& y_label, double lo, double hi);

}  // namespace gnireg::cli
