#include "gnireg_cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace gnireg::cli {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 420;
constexpr double kLeft = 70;
constexpr double kRight = 20;
constexpr double kTop = 40;
constexpr double kBottom = 50;

const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

void header(std::ostringstream& os, const std::string& title, const std::string& x_label,
            const std::string& y_label) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(title) << "</text>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
     << escape(x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << kHeight / 2 << ")\">" << escape(y_label) << "</text>\n";
}

}  // namespace

std::string line_plot(const std::vector<Series>& series, const std::string& title,
                      const std::string& x_label, const std::string& y_label) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (1 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream os;
  header(os, title, x_label, y_label);
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double fx = x0 + (x1 - x0) * t / 4, fy = y0 + (y1 - y0) * t / 4;
    os << "<text x=\"" << num(px(fx)) << "\" y=\"" << num(kTop + ph + 16)
       << "\" text-anchor=\"middle\">" << num(fx) << "</text>\n"
       << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py(fy) + 4)
       << "\" text-anchor=\"end\">" << num(fy) << "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* colour = kColours[s % std::size(kColours)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    const auto& sr = series[s];
    for (std::size_t i = 0; i < std::min(sr.x.size(), sr.y.size()); ++i) {
      if (!std::isfinite(sr.x[i]) || !std::isfinite(sr.y[i])) continue;
      os << num(px(sr.x[i])) << ',' << num(py(sr.y[i])) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << num(kLeft + pw - 8) << "\" y=\"" << num(kTop + 16 + 16 * static_cast<double>(s))
       << "\" text-anchor=\"end\" fill=\"" << colour << "\">" << escape(sr.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string heatmap(const std::vector<std::vector<double>>& rows,
                    const std::vector<std::string>& row_labels, const std::string& title,
                    const std::string& x_label, const std::string& y_label, double lo, double hi) {
  std::ostringstream os;
  header(os, title, x_label, y_label);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const std::size_t nrows = rows.size();
  std::size_t ncols = 0;
  for (const auto& r : rows) ncols = std::max(ncols, r.size());
  if (nrows > 0 && ncols > 0) {
    const double cw = pw / static_cast<double>(ncols);
    const double ch = ph / static_cast<double>(nrows);
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::size_t r = 0; r < nrows; ++r) {
      const double y = kTop + ph - ch * static_cast<double>(r + 1);
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        double t = (rows[r][c] - lo) / span;
        t = std::isfinite(t) ? std::clamp(t, 0.0, 1.0) : 0.0;
        const int shade = static_cast<int>(std::lround(255 * (1 - t)));
        os << "<rect x=\"" << num(kLeft + cw * static_cast<double>(c)) << "\" y=\"" << num(y)
           << "\" width=\"" << num(cw) << "\" height=\"" << num(ch) << "\" fill=\"rgb(" << shade
           << ',' << shade << ",255)\"/>\n";
      }
      if (r < row_labels.size() && (nrows <= 12 || r % (nrows / 12 + 1) == 0)) {
        os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + ch / 2 + 4)
           << "\" text-anchor=\"end\">" << escape(row_labels[r]) << "</text>\n";
      }
    }
    for (int t = 0; t <= 4; ++t) {
      const double bin = static_cast<double>(ncols - 1) * t / 4;
      os << "<text x=\"" << num(kLeft + cw * (bin + 0.5)) << "\" y=\"" << num(kTop + ph + 16)
         << "\" text-anchor=\"middle\">" << num(std::round(bin)) << "</text>\n";
    }
  }
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n</svg>\n";
  return os.str();
}

}  // namespace gnireg::cli
