#include "satrrm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace satrrm::svg {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 70, kMarginRight = 20, kMarginTop = 40, kMarginBottom = 55;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Range {
  double lo = 0.0, hi = 1.0;
  double clamp01(double v) const { return (v - lo) / (hi - lo); }
};

Range padded(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = (lo == 0.0) ? 1.0 : std::abs(lo) * 0.1;
    return {lo - pad, hi + pad};
  }
  const double pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

std::string fmt_tick(double v) {
  std::ostringstream os;
  const double a = std::abs(v);
  if (v != 0.0 && (a >= 1e5 || a < 1e-3))
    os.precision(2), os << std::scientific << v;
  else
    os.precision(4), os << v;
  return os.str();
}

void axes(std::ostringstream& out, const std::string& title, const std::string& x_label,
          const std::string& y_label, const Range& xr, const Range& yr) {
  const int x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const int y0 = kHeight - kMarginBottom, y1 = kMarginTop;
  out << "<rect width='" << kWidth << "' height='" << kHeight << "' fill='white'/>\n";
  out << "<text x='" << kWidth / 2 << "' y='22' text-anchor='middle' font-size='16'>"
      << title << "</text>\n";
  out << "<line x1='" << x0 << "' y1='" << y0 << "' x2='" << x1 << "' y2='" << y0
      << "' stroke='black'/>\n";
  out << "<line x1='" << x0 << "' y1='" << y0 << "' x2='" << x0 << "' y2='" << y1
      << "' stroke='black'/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = i / 5.0;
    const double px = x0 + fx * (x1 - x0);
    const double py = y0 - fx * (y0 - y1);
    out << "<line x1='" << px << "' y1='" << y0 << "' x2='" << px << "' y2='" << y0 + 4
        << "' stroke='black'/>\n";
    out << "<text x='" << px << "' y='" << y0 + 18 << "' text-anchor='middle' font-size='11'>"
        << fmt_tick(xr.lo + fx * (xr.hi - xr.lo)) << "</text>\n";
    out << "<line x1='" << x0 - 4 << "' y1='" << py << "' x2='" << x0 << "' y2='" << py
        << "' stroke='black'/>\n";
    out << "<text x='" << x0 - 8 << "' y='" << py + 4 << "' text-anchor='end' font-size='11'>"
        << fmt_tick(yr.lo + fx * (yr.hi - yr.lo)) << "</text>\n";
  }
  out << "<text x='" << (x0 + x1) / 2 << "' y='" << kHeight - 12
      << "' text-anchor='middle' font-size='13'>" << x_label << "</text>\n";
  out << "<text x='16' y='" << (y0 + y1) / 2
      << "' text-anchor='middle' font-size='13' transform='rotate(-90 16 " << (y0 + y1) / 2
      << ")'>" << y_label << "</text>\n";
}

}  // namespace

std::string line_chart(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<Series>& series) {
  double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  bool first = true;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (first) {
        xlo = xhi = x;
        ylo = yhi = y;
        first = false;
      }
      xlo = std::min(xlo, x), xhi = std::max(xhi, x);
      ylo = std::min(ylo, y), yhi = std::max(yhi, y);
    }
  const Range xr = padded(xlo, xhi), yr = padded(ylo, yhi);
  const int x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const int y0 = kHeight - kMarginBottom, y1 = kMarginTop;

  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='"
      << kHeight << "'>\n";
  axes(out, title, x_label, y_label, xr, yr);
  for (std::size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.8' points='";
    for (const auto& [x, y] : series[si].points)
      out << x0 + xr.clamp01(x) * (x1 - x0) << "," << y0 - yr.clamp01(y) * (y0 - y1) << " ";
    out << "'/>\n";
    for (const auto& [x, y] : series[si].points)
      out << "<circle cx='" << x0 + xr.clamp01(x) * (x1 - x0) << "' cy='"
          << y0 - yr.clamp01(y) * (y0 - y1) << "' r='2.5' fill='" << color << "'/>\n";
    out << "<text x='" << x1 - 8 << "' y='" << y1 + 16 + 16 * static_cast<int>(si)
        << "' text-anchor='end' font-size='12' fill='" << color << "'>" << series[si].label
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string bar_chart(const std::string& title, const std::string& y_label,
                      const std::vector<std::string>& labels,
                      const std::vector<double>& values) {
  double hi = 0.0;
  for (double v : values) hi = std::max(hi, v);
  const Range yr = padded(0.0, hi);
  const int x0 = kMarginLeft, x1 = kWidth - kMarginRight;
  const int y0 = kHeight - kMarginBottom, y1 = kMarginTop;
  const std::size_t n = values.size();

  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kWidth << "' height='"
      << kHeight << "'>\n";
  axes(out, title, "", y_label, {0.0, static_cast<double>(n)}, yr);
  const double slot = static_cast<double>(x1 - x0) / std::max<std::size_t>(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = yr.clamp01(values[i]) * (y0 - y1);
    const double bx = x0 + slot * (static_cast<double>(i) + 0.2);
    out << "<rect x='" << bx << "' y='" << y0 - h << "' width='" << slot * 0.6
        << "' height='" << h << "' fill='" << kPalette[i % 8] << "'/>\n";
    out << "<text x='" << bx + slot * 0.3 << "' y='" << y0 + 18
        << "' text-anchor='middle' font-size='11'>" << labels[i] << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace satrrm::svg
