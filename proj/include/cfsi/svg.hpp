#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cfsi {

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

struct PlotSpec {
  std::string title, xlabel, ylabel;
  bool loglog = false;     // base-10 log axes; data must be strictly positive
  std::string annotation;  // free-form note drawn inside the frame (e.g. a fitted slope)
  int width = 640, height = 480;
};

/// Static SVG line plot: frame, ticks, one polyline per series, legend, and
/// the optional annotation.  No dependencies, deterministic output.  Throws
/// std::invalid_argument on empty input, length mismatches, or nonpositive
/// data on log axes.
void emit_plot(const std::vector<PlotSeries>& series, const PlotSpec& spec, std::ostream& os);

}  // namespace cfsi
