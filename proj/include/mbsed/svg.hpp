#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mbsed {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> err; // optional symmetric error bars
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    int width = 640;
    int height = 420;
};

/// Minimal native SVG line plot with axes, ticks and a legend.
std::string line_plot_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);

/// Heat map of values[iy][ix] on a regular grid.
std::string heatmap_svg(const PlotSpec& spec, const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<std::vector<double>>& values);

void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace mbsed
