#pragma once

#include <optional>
#include <string>
#include <vector>

namespace hlab {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct LinePlot {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<PlotSeries> series;
    /// Optional dashed horizontal reference line (e.g. the -tolerance level).
    std::optional<double> reference;
};

/// Self-contained SVG document: axes, ticks, one polyline per series, legend.
std::string render_svg(const LinePlot &plot);
void write_svg(const std::string &path, const LinePlot &plot);

}  // namespace hlab
