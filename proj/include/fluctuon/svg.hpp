#pragma once

#include <string>
#include <vector>

namespace fluctuon {

struct Series {
    std::string label;
    std::vector<double> x, y;
    std::vector<double> err;  // optional symmetric error bars
    bool markers = false;     // markers instead of a polyline
};

struct PlotSpec {
    std::string title, xlabel, ylabel;
    bool logy = false;
    int width = 640, height = 420;
};

// standalone SVG document
std::string svg_plot(const PlotSpec& spec, const std::vector<Series>& series);

}  // namespace fluctuon
