#include "cfsi/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace cfsi {
namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
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

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Axis {
  double lo = 0.0, hi = 1.0;  // in plot coordinates (log10 when loglog)
  double px0 = 0.0, px1 = 1.0;

  double map(double v) const {
    const double t = (v - lo) / (hi - lo);
    return px0 + t * (px1 - px0);
  }
};

// round tick positions: multiples of a "nice" step covering [lo, hi]
std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (const double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (mag * m >= raw) { step = mag * m; break; }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12 * span; t += step)
    out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  return out;
}

// integer powers of ten inside the (log10) range, or a linear fallback for
// ranges narrower than a decade
std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> out;
  for (double e = std::ceil(lo - 1e-9); e <= hi + 1e-9; e += 1.0) out.push_back(e);
  if (out.size() >= 2) return out;
  return linear_ticks(lo, hi);
}

const char* kColors[] = {"#1f6fb2", "#c44f1d", "#2c8a4b", "#8055a6"};

}  // namespace

void emit_plot(const std::vector<PlotSeries>& series, const PlotSpec& spec, std::ostream& os) {
  if (series.empty()) throw std::invalid_argument("plot: no series");
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  std::size_t points = 0;
  for (const PlotSeries& s : series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("plot: x/y length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      double px = s.x[i], py = s.y[i];
      if (spec.loglog) {
        if (!(px > 0.0) || !(py > 0.0))
          throw std::invalid_argument("plot: log axes need positive data");
        px = std::log10(px);
        py = std::log10(py);
      }
      xlo = std::min(xlo, px), xhi = std::max(xhi, px);
      ylo = std::min(ylo, py), yhi = std::max(yhi, py);
      ++points;
    }
  }
  if (points == 0) throw std::invalid_argument("plot: all series empty");
  if (xhi - xlo < 1e-12) { xlo -= 0.5; xhi += 0.5; }
  if (yhi - ylo < 1e-12) { ylo -= 0.5; yhi += 0.5; }
  const double xpad = 0.04 * (xhi - xlo), ypad = 0.06 * (yhi - ylo);
  xlo -= xpad, xhi += xpad, ylo -= ypad, yhi += ypad;

  const double W = spec.width, H = spec.height;
  const double ml = 72, mr = 20, mt = 40, mb = 52;
  Axis ax{xlo, xhi, ml, W - mr};
  Axis ay{ylo, yhi, H - mb, mt};  // y grows upward on the page

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
     << spec.height << "\" viewBox=\"0 0 " << spec.width << " " << spec.height << "\">\n"
     << "<rect width=\"" << spec.width << "\" height=\"" << spec.height
     << "\" fill=\"white\"/>\n";
  os << "<rect x=\"" << num(ml) << "\" y=\"" << num(mt) << "\" width=\"" << num(W - ml - mr)
     << "\" height=\"" << num(H - mt - mb)
     << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const auto xticks = spec.loglog ? log_ticks(xlo, xhi) : linear_ticks(xlo, xhi);
  for (const double t : xticks) {
    const double px = ax.map(t);
    os << "<line x1=\"" << num(px) << "\" y1=\"" << num(H - mb) << "\" x2=\"" << num(px)
       << "\" y2=\"" << num(H - mb + 5) << "\" stroke=\"black\"/>\n";
    const std::string label = spec.loglog ? "1e" + num(t) : num(t);
    os << "<text x=\"" << num(px) << "\" y=\"" << num(H - mb + 18)
       << "\" font-size=\"11\" text-anchor=\"middle\">" << xml_escape(label) << "</text>\n";
  }
  const auto yticks = spec.loglog ? log_ticks(ylo, yhi) : linear_ticks(ylo, yhi);
  for (const double t : yticks) {
    const double py = ay.map(t);
    os << "<line x1=\"" << num(ml - 5) << "\" y1=\"" << num(py) << "\" x2=\"" << num(ml)
       << "\" y2=\"" << num(py) << "\" stroke=\"black\"/>\n";
    const std::string label = spec.loglog ? "1e" + num(t) : num(t);
    os << "<text x=\"" << num(ml - 8) << "\" y=\"" << num(py + 4)
       << "\" font-size=\"11\" text-anchor=\"end\">" << xml_escape(label) << "</text>\n";
  }

  int color = 0;
  double legend_y = mt + 16;
  for (const PlotSeries& s : series) {
    const char* stroke = kColors[color % 4];
    ++color;
    os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double px = spec.loglog ? std::log10(s.x[i]) : s.x[i];
      const double py = spec.loglog ? std::log10(s.y[i]) : s.y[i];
      os << num(ax.map(px)) << "," << num(ay.map(py)) << " ";
    }
    os << "\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const double px = spec.loglog ? std::log10(s.x[i]) : s.x[i];
      const double py = spec.loglog ? std::log10(s.y[i]) : s.y[i];
      os << "<circle cx=\"" << num(ax.map(px)) << "\" cy=\"" << num(ay.map(py))
         << "\" r=\"2.5\" fill=\"" << stroke << "\"/>\n";
    }
    if (!s.label.empty()) {
      os << "<text x=\"" << num(ml + 10) << "\" y=\"" << num(legend_y)
         << "\" font-size=\"12\" fill=\"" << stroke << "\">" << xml_escape(s.label)
         << "</text>\n";
      legend_y += 16;
    }
  }

  if (!spec.title.empty())
    os << "<text x=\"" << num(W / 2) << "\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">"
       << xml_escape(spec.title) << "</text>\n";
  if (!spec.xlabel.empty())
    os << "<text x=\"" << num((ml + W - mr) / 2) << "\" y=\"" << num(H - 14)
       << "\" font-size=\"13\" text-anchor=\"middle\">" << xml_escape(spec.xlabel)
       << "</text>\n";
  if (!spec.ylabel.empty())
    os << "<text x=\"16\" y=\"" << num((mt + H - mb) / 2)
       << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << num((mt + H - mb) / 2) << ")\">" << xml_escape(spec.ylabel) << "</text>\n";
  if (!spec.annotation.empty())
    os << "<text x=\"" << num(W - mr - 8) << "\" y=\"" << num(mt + 16)
       << "\" font-size=\"12\" text-anchor=\"end\">" << xml_escape(spec.annotation)
       << "</text>\n";
  os << "</svg>\n";
}

}  // namespace cfsi
