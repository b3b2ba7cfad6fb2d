#include "market_eq/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "market_eq/errors.hpp"

namespace market_eq {
namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 190, kTop = 30, kBottom = 50;
constexpr int kTicks = 5;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};

std::string fmt(const char* format, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  // Widens empty or zero-width ranges so the mapping stays finite.
  void settle() {
    if (lo > hi) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(lo))) {
      const double pad = std::max(0.5, std::abs(lo) * 0.1);
      lo -= pad;
      hi += pad;
    }
  }
  double map(double v, double from, double to) const { return from + (v - lo) / (hi - lo) * (to - from); }
};

}  // namespace

std::string render_chart(const SweepResult& result, const std::vector<std::string>& columns) {
  if (columns.empty()) throw std::invalid_argument("chart needs at least one column");
  std::vector<std::size_t> index;
  for (const auto& c : columns) {
    try {
      index.push_back(result.column(c));
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("chart column '" + c + "' not in result");
    }
  }

  Range xr, yr;
  for (const auto& row : result.rows) {
    xr.add(row.value);
    for (auto k : index) yr.add(row.metrics[k]);
  }
  xr.settle();
  yr.settle();

  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt("%g", kWidth) +
       "\" height=\"" + fmt("%g", kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes, ticks and grid.
  s += "<g stroke=\"black\" fill=\"none\">\n";
  s += "<line x1=\"" + fmt("%.2f", x0) + "\" y1=\"" + fmt("%.2f", y0) + "\" x2=\"" + fmt("%.2f", x1) +
       "\" y2=\"" + fmt("%.2f", y0) + "\"/>\n";
  s += "<line x1=\"" + fmt("%.2f", x0) + "\" y1=\"" + fmt("%.2f", y0) + "\" x2=\"" + fmt("%.2f", x0) +
       "\" y2=\"" + fmt("%.2f", y1) + "\"/>\n";
  s += "</g>\n<g fill=\"black\">\n";
  for (int t = 0; t <= kTicks; ++t) {
    const double xv = xr.lo + (xr.hi - xr.lo) * t / kTicks;
    const double yv = yr.lo + (yr.hi - yr.lo) * t / kTicks;
    const double px = xr.map(xv, x0, x1), py = yr.map(yv, y0, y1);
    s += "<line x1=\"" + fmt("%.2f", px) + "\" y1=\"" + fmt("%.2f", y0) + "\" x2=\"" + fmt("%.2f", px) +
         "\" y2=\"" + fmt("%.2f", y0 + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt("%.2f", px) + "\" y=\"" + fmt("%.2f", y0 + 18) + "\" text-anchor=\"middle\">" +
         fmt("%.4g", xv) + "</text>\n";
    s += "<line x1=\"" + fmt("%.2f", x0 - 5) + "\" y1=\"" + fmt("%.2f", py) + "\" x2=\"" + fmt("%.2f", x1) +
         "\" y2=\"" + fmt("%.2f", py) + "\" stroke=\"#dddddd\"/>\n";
    s += "<text x=\"" + fmt("%.2f", x0 - 8) + "\" y=\"" + fmt("%.2f", py + 4) + "\" text-anchor=\"end\">" +
         fmt("%.4g", yv) + "</text>\n";
  }
  s += "<text x=\"" + fmt("%.2f", (x0 + x1) / 2) + "\" y=\"" + fmt("%.2f", kHeight - 10) +
       "\" text-anchor=\"middle\">" + escape(result.parameter) + "</text>\n";
  s += "</g>\n";

  // Series.
  for (std::size_t c = 0; c < index.size(); ++c) {
    const char* colour = kPalette[c % std::size(kPalette)];
    std::string points, markers;
    for (const auto& row : result.rows) {
      const double v = row.metrics[index[c]];
      if (!std::isfinite(v)) continue;
      const std::string px = fmt("%.2f", xr.map(row.value, x0, x1)), py = fmt("%.2f", yr.map(v, y0, y1));
      points += (points.empty() ? "" : " ") + px + "," + py;
      markers += "<circle cx=\"" + px + "\" cy=\"" + py + "\" r=\"3\"/>\n";
    }
    s += "<g stroke=\"" + std::string(colour) + "\" fill=\"" + colour + "\">\n";
    if (!points.empty()) s += "<polyline fill=\"none\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    s += markers;
    s += "</g>\n";
  }

  // Legend.
  s += "<g>\n";
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const double ly = kTop + 10 + 20.0 * static_cast<double>(c);
    const double lx = kWidth - kRight + 15;
    s += "<line x1=\"" + fmt("%.2f", lx) + "\" y1=\"" + fmt("%.2f", ly) + "\" x2=\"" + fmt("%.2f", lx + 20) +
         "\" y2=\"" + fmt("%.2f", ly) + "\" stroke=\"" + kPalette[c % std::size(kPalette)] +
         "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"" + fmt("%.2f", lx + 26) + "\" y=\"" + fmt("%.2f", ly + 4) + "\">" + escape(columns[c]) +
         "</text>\n";
  }
  s += "</g>\n</svg>\n";
  return s;
}

void emit_chart(const SweepResult& result, const std::vector<std::string>& columns,
                const std::filesystem::path& path) {
  const std::string svg = render_chart(result, columns);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << svg;
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace market_eq
