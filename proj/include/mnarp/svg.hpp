#pragma once

#include <mnarp/sweep.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace mnarp {

/// Occupation colormap: 0 -> dark blue, 1 -> yellow (viridis anchors).
/// Values outside [0, 1] are clamped. Returns "#rrggbb".
std::string occupation_color(double value);

/// One emitter's map as a standalone SVG: area (units of pi) on the vertical
/// axis, spacing or width (meV) on the horizontal axis, and a colorbar.
/// The cell rectangles sit in <g id="cells">; the job config is embedded in
/// <metadata>.
std::string heatmap_svg(const OccupationMap& map, std::size_t emitter, const std::string& title = {});

void render_heatmap(const OccupationMap& map, std::size_t emitter, const std::filesystem::path& path);

/// All emitters side by side, one panel each, with a shared colorbar.
void render_heatmap_panels(const OccupationMap& map, const std::filesystem::path& path);

struct LineSeries
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
};

struct LinePlot
{
    std::string title;
    std::string x_label;
    std::string y_label;
    double y_min = 0.0;
    double y_max = 1.0;
    std::vector<LineSeries> series;
    /// Job description embedded in the file's <metadata> element.
    std::string metadata;
};

std::string line_plot_svg(const LinePlot& plot);

void render_line_plot(const LinePlot& plot, const std::filesystem::path& path);

/// Occupation vs area (units of pi) at one axis value, one series per emitter.
LinePlot area_cut(const OccupationMap& map, std::size_t axis_index, const std::string& title = {});

/// Distinct colors for up to ten series, then repeating.
std::string series_color(std::size_t index);

} // namespace mnarp
