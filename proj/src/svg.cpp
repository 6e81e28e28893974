#include <mnarp/svg.hpp>

#include <mnarp/config.hpp>
#include <mnarp/errors.hpp>
#include <mnarp/units.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace mnarp {

namespace {

constexpr double panel_w = 300.0;
constexpr double panel_h = 300.0;
constexpr double margin_left = 64.0;
constexpr double margin_right = 20.0;
constexpr double margin_top = 36.0;
constexpr double margin_bottom = 52.0;
constexpr double colorbar_w = 80.0;

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label_num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& text)
{
    std::string out;
    for (char c : text) {
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

// Tick positions at 1/2/5 x 10^k covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 5)
{
    if (!(hi > lo)) {
        return {lo};
    }
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) {
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + 1e-9 * step; t += step) {
        ticks.push_back(t);
    }
    return ticks;
}

// Cell edges halfway between grid values; single values get a unit-wide cell.
std::vector<double> cell_edges(const std::vector<double>& v)
{
    std::vector<double> e(v.size() + 1);
    if (v.size() == 1) {
        e[0] = v[0] - 0.5;
        e[1] = v[0] + 0.5;
        return e;
    }
    for (std::size_t i = 1; i < v.size(); ++i) {
        e[i] = 0.5 * (v[i - 1] + v[i]);
    }
    e[0] = v[0] - (e[1] - v[0]);
    e[v.size()] = v.back() + (v.back() - e[v.size() - 1]);
    return e;
}

struct Frame
{
    double x0, y0;      // top-left of the plot area
    double xlo, xhi;    // data range
    double ylo, yhi;
    double px(double x) const { return x0 + (x - xlo) / (xhi - xlo) * panel_w; }
    double py(double y) const { return y0 + panel_h - (y - ylo) / (yhi - ylo) * panel_h; }
};

void axes(std::ostream& out, const Frame& f, const std::string& x_label, const std::string& y_label,
          const std::string& title)
{
    out << "<rect x=\"" << num(f.x0) << "\" y=\"" << num(f.y0) << "\" width=\"" << num(panel_w) << "\" height=\""
        << num(panel_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(f.xlo, f.xhi)) {
        const double x = f.px(t);
        out << "<line x1=\"" << num(x) << "\" y1=\"" << num(f.y0 + panel_h) << "\" x2=\"" << num(x) << "\" y2=\""
            << num(f.y0 + panel_h + 5) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << num(x) << "\" y=\"" << num(f.y0 + panel_h + 18)
            << "\" text-anchor=\"middle\">" << label_num(t) << "</text>\n";
    }
    for (double t : nice_ticks(f.ylo, f.yhi)) {
        const double y = f.py(t);
        out << "<line x1=\"" << num(f.x0 - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(f.x0) << "\" y2=\""
            << num(y) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << num(f.x0 - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
            << label_num(t) << "</text>\n";
    }
    out << "<text x=\"" << num(f.x0 + panel_w / 2) << "\" y=\"" << num(f.y0 + panel_h + 40)
        << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n"
        << "<text x=\"" << num(f.x0 - 44) << "\" y=\"" << num(f.y0 + panel_h / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << num(f.x0 - 44) << ' ' << num(f.y0 + panel_h / 2)
        << ")\">" << escape(y_label) << "</text>\n";
    if (!title.empty()) {
        out << "<text x=\"" << num(f.x0 + panel_w / 2) << "\" y=\"" << num(f.y0 - 12)
            << "\" text-anchor=\"middle\" font-weight=\"bold\">" << escape(title) << "</text>\n";
    }
}

void colorbar(std::ostream& out, double x, double y)
{
    constexpr int steps = 50;
    const double h = panel_h / steps;
    out << "<g id=\"colorbar\">\n";
    for (int i = 0; i < steps; ++i) {
        const double v = (i + 0.5) / steps;
        out << "<rect x=\"" << num(x) << "\" y=\"" << num(y + panel_h - (i + 1) * h) << "\" width=\"16\" height=\""
            << num(h + 0.3) << "\" fill=\"" << occupation_color(v) << "\"/>\n";
    }
    out << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"16\" height=\"" << num(panel_h)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : {0.0, 0.5, 1.0}) {
        out << "<text x=\"" << num(x + 22) << "\" y=\"" << num(y + panel_h - t * panel_h + 4) << "\">"
            << label_num(t) << "</text>\n";
    }
    out << "<text x=\"" << num(x + 8) << "\" y=\"" << num(y - 10)
        << "\" text-anchor=\"middle\">occupation</text>\n</g>\n";
}

std::string axis_label(const OccupationMap& map)
{
    return map.spec.axis == SweepAxis::spacing ? "notch spacing (meV)" : "notch width (meV)";
}

void cells(std::ostream& out, const OccupationMap& map, std::size_t emitter, const Frame& f,
           const std::vector<double>& xe, const std::vector<double>& ye)
{
    out << "<g id=\"cells\" shape-rendering=\"crispEdges\">\n";
    for (std::size_t a = 0; a < map.n_areas(); ++a) {
        for (std::size_t j = 0; j < map.n_axis(); ++j) {
            const double x1 = f.px(xe[j]);
            const double x2 = f.px(xe[j + 1]);
            const double y1 = f.py(ye[a + 1]);
            const double y2 = f.py(ye[a]);
            out << "<rect x=\"" << num(x1) << "\" y=\"" << num(y1) << "\" width=\"" << num(x2 - x1) << "\" height=\""
                << num(y2 - y1) << "\" fill=\"" << occupation_color(map.at(a, j, emitter)) << "\"/>\n";
        }
    }
    out << "</g>\n";
}

Frame map_frame(const OccupationMap& map, double x0, double y0, std::vector<double>& xe, std::vector<double>& ye)
{
    xe = cell_edges(map.spec.axis_values_meV);
    std::vector<double> areas_pi(map.spec.areas_rad);
    for (double& a : areas_pi) {
        a /= units::pi;
    }
    ye = cell_edges(areas_pi);
    return Frame{x0, y0, xe.front(), xe.back(), ye.front(), ye.back()};
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("write failed for '" + path.string() + "'");
    }
}

void svg_open(std::ostream& out, double w, double h, const std::string& metadata)
{
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
        << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h)
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<metadata>multinarp " << MNARP_VERSION << "\n"
        << escape(metadata) << "</metadata>\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string map_metadata(const OccupationMap& map)
{
    RunConfig config;
    config.spec = map.spec;
    return format_config(config);
}

void check_map(const OccupationMap& map)
{
    if (map.values.size() != map.n_areas() * map.n_axis() * map.n_emitters() || map.values.empty()) {
        throw InvalidArgument("occupation map size does not match its spec");
    }
}

} // namespace

std::string occupation_color(double value)
{
    static constexpr std::array<std::array<double, 3>, 9> anchors = {{
        {68, 1, 84},
        {71, 44, 122},
        {59, 81, 139},
        {44, 113, 142},
        {33, 144, 141},
        {39, 173, 129},
        {92, 200, 99},
        {170, 220, 50},
        {253, 231, 37},
    }};
    const double v = std::isnan(value) ? 0.0 : std::clamp(value, 0.0, 1.0);
    const double pos = v * (anchors.size() - 1);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(pos), anchors.size() - 2);
    const double w = pos - static_cast<double>(i);
    char buf[8];
    int rgb[3];
    for (int c = 0; c < 3; ++c) {
        rgb[c] = static_cast<int>(std::lround(anchors[i][c] * (1.0 - w) + anchors[i + 1][c] * w));
    }
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

std::string heatmap_svg(const OccupationMap& map, std::size_t emitter, const std::string& title)
{
    check_map(map);
    if (emitter >= map.n_emitters()) {
        throw InvalidArgument("emitter index out of range");
    }
    std::vector<double> xe;
    std::vector<double> ye;
    const Frame f = map_frame(map, margin_left, margin_top, xe, ye);
    std::ostringstream out;
    svg_open(out, margin_left + panel_w + margin_right + colorbar_w, margin_top + panel_h + margin_bottom,
             map_metadata(map));
    cells(out, map, emitter, f, xe, ye);
    axes(out, f, axis_label(map), "pulse area (π rad)", title);
    colorbar(out, margin_left + panel_w + margin_right + 8, margin_top);
    out << "</svg>\n";
    return out.str();
}

void render_heatmap(const OccupationMap& map, std::size_t emitter, const std::filesystem::path& path)
{
    write_file(path, heatmap_svg(map, emitter, map.spec.name + " QD" + std::to_string(emitter + 1)));
}

void render_heatmap_panels(const OccupationMap& map, const std::filesystem::path& path)
{
    check_map(map);
    const std::size_t per_row = std::min<std::size_t>(map.n_emitters(), 5);
    const std::size_t rows = (map.n_emitters() + per_row - 1) / per_row;
    const double cell_w = margin_left + panel_w + margin_right;
    const double cell_h = margin_top + panel_h + margin_bottom;
    std::ostringstream out;
    svg_open(out, per_row * cell_w + colorbar_w, rows * cell_h, map_metadata(map));
    for (std::size_t e = 0; e < map.n_emitters(); ++e) {
        const double x0 = (e % per_row) * cell_w + margin_left;
        const double y0 = (e / per_row) * cell_h + margin_top;
        std::vector<double> xe;
        std::vector<double> ye;
        const Frame f = map_frame(map, x0, y0, xe, ye);
        out << "<g id=\"panel-qd" << e + 1 << "\">\n";
        cells(out, map, e, f, xe, ye);
        axes(out, f, axis_label(map), "pulse area (π rad)", map.spec.name + " QD" + std::to_string(e + 1));
        out << "</g>\n";
    }
    colorbar(out, per_row * cell_w + 8, margin_top);
    out << "</svg>\n";
    write_file(path, out.str());
}

std::string series_color(std::size_t index)
{
    static constexpr std::array<const char*, 10> palette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                                            "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette[index % palette.size()];
}

std::string line_plot_svg(const LinePlot& plot)
{
    double xlo = std::numeric_limits<double>::infinity();
    double xhi = -xlo;
    for (const auto& s : plot.series) {
        if (s.x.size() != s.y.size()) {
            throw InvalidArgument("line series '" + s.label + "' has mismatched x and y");
        }
        for (double x : s.x) {
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
        }
    }
    if (!std::isfinite(xlo)) {
        xlo = 0.0;
        xhi = 1.0;
    } else if (!(xhi > xlo)) {
        xlo -= 0.5;
        xhi += 0.5;
    }
    const double legend_w = 150.0;
    const Frame f{margin_left, margin_top, xlo, xhi, plot.y_min, plot.y_max};
    std::ostringstream out;
    svg_open(out, margin_left + panel_w + margin_right + legend_w, margin_top + panel_h + margin_bottom,
             plot.metadata);
    out << "<g id=\"series\" fill=\"none\" stroke-width=\"1.5\">\n";
    for (const auto& s : plot.series) {
        if (s.x.empty()) {
            continue;
        }
        out << "<polyline stroke=\"" << s.color << "\"" << (s.dashed ? " stroke-dasharray=\"6 4\"" : "")
            << " points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double y = std::clamp(s.y[i], plot.y_min, plot.y_max);
            out << (i ? " " : "") << num(f.px(s.x[i])) << ',' << num(f.py(y));
        }
        out << "\"/>\n";
    }
    out << "</g>\n";
    axes(out, f, plot.x_label, plot.y_label, plot.title);
    const double lx = margin_left + panel_w + margin_right + 4;
    for (std::size_t i = 0; i < plot.series.size(); ++i) {
        const auto& s = plot.series[i];
        const double y = margin_top + 10 + 18.0 * i;
        out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(y) << "\" x2=\"" << num(lx + 24) << "\" y2=\"" << num(y)
            << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
            << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n"
            << "<text x=\"" << num(lx + 30) << "\" y=\"" << num(y + 4) << "\">" << escape(s.label) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

void render_line_plot(const LinePlot& plot, const std::filesystem::path& path)
{
    write_file(path, line_plot_svg(plot));
}

LinePlot area_cut(const OccupationMap& map, std::size_t axis_index, const std::string& title)
{
    check_map(map);
    if (axis_index >= map.n_axis()) {
        throw InvalidArgument("axis index out of range");
    }
    LinePlot plot;
    plot.title = title.empty() ? map.spec.name + (map.spec.axis == SweepAxis::spacing ? " spacing " : " width ") +
                                     label_num(map.spec.axis_values_meV[axis_index]) + " meV"
                               : title;
    plot.x_label = "pulse area (π rad)";
    plot.y_label = "exciton occupation";
    plot.metadata = map_metadata(map);
    for (std::size_t e = 0; e < map.n_emitters(); ++e) {
        LineSeries s;
        s.label = "QD" + std::to_string(e + 1);
        s.color = series_color(e);
        for (std::size_t a = 0; a < map.n_areas(); ++a) {
            s.x.push_back(map.spec.areas_rad[a] / units::pi);
            s.y.push_back(map.at(a, axis_index, e));
        }
        plot.series.push_back(std::move(s));
    }
    return plot;
}

} // namespace mnarp
