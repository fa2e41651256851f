#pragma once

#include <string>
#include <vector>

namespace zice::app {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f3b73";
    bool dashed = false;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

/// Cells are centred on the axis values; values are row-major |x| x |y|.
struct Heatmap {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::string value_label;
    std::vector<double> x_axis;
    std::vector<double> y_axis;
    std::vector<double> values;
    std::vector<Series> overlays;
};

std::string render_line_plot(const LinePlot& plot);
/// Diverging colour scale symmetric about zero.
std::string render_heatmap(const Heatmap& map);

} // namespace zice::app
