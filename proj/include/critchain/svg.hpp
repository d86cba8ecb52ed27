#pragma once
// critchain -- minimal self-contained SVG rendering for sweep results.
//
// Two chart types cover every figure: multi-series line plots and dense
// heatmaps.  No external renderer; output is a plain .svg file with a frame,
// min/max tick labels, and a caption.  NaNs break line segments and render
// as blank heatmap cells.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "critchain/errors.hpp"

namespace critchain::svg {

namespace detail {

inline std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

inline void finite_minmax(const std::vector<double>& vs, double& lo, double& hi) {
    for (double v : vs) {
        if (!std::isfinite(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
}

/// Five-stop blue->green->yellow colormap.
inline std::string colormap(double t) {
    t = std::clamp(t, 0.0, 1.0);
    static const double stops[5][3] = {{68, 1, 84},     {59, 82, 139},   {33, 145, 140},
                                       {94, 201, 98},   {253, 231, 37}};
    const double x = t * 4.0;
    const int i = std::min(3, static_cast<int>(x));
    const double f = x - i;
    std::ostringstream os;
    os << "rgb(" << static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0])) << ','
       << static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1])) << ','
       << static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2])) << ')';
    return os.str();
}

}  // namespace detail

struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
};

/// Multi-series line plot; axes autoscale to the finite data range.
inline void write_line_plot(const std::string& path, const std::vector<Series>& series,
                            const std::string& title, const std::string& x_label,
                            const std::string& y_label) {
    const double w = 720, h = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (const auto& s : series) {
        detail::finite_minmax(s.x, x_lo, x_hi);
        detail::finite_minmax(s.y, y_lo, y_hi);
    }
    if (!(x_lo < x_hi)) { x_lo -= 0.5; x_hi += 0.5; }
    if (!(y_lo < y_hi)) { y_lo -= 0.5; y_hi += 0.5; }
    const double pad = 0.03 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
    auto px = [&](double x) { return ml + (x - x_lo) / (x_hi - x_lo) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - y_lo) / (y_hi - y_lo) * (h - mt - mb); };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
       << "' viewBox='0 0 " << w << ' ' << h << "'>\n"
       << "<rect width='100%' height='100%' fill='white'/>\n"
       << "<rect x='" << ml << "' y='" << mt << "' width='" << w - ml - mr << "' height='"
       << h - mt - mb << "' fill='none' stroke='black'/>\n"
       << "<text x='" << w / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
       << "</text>\n"
       << "<text x='" << w / 2 << "' y='" << h - 12 << "' text-anchor='middle' font-size='12'>"
       << x_label << "</text>\n"
       << "<text x='16' y='" << h / 2
       << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 " << h / 2 << ")'>"
       << y_label << "</text>\n"
       << "<text x='" << ml << "' y='" << h - mb + 16 << "' font-size='10'>"
       << detail::num(x_lo) << "</text>\n"
       << "<text x='" << w - mr << "' y='" << h - mb + 16
       << "' text-anchor='end' font-size='10'>" << detail::num(x_hi) << "</text>\n"
       << "<text x='" << ml - 4 << "' y='" << h - mb << "' text-anchor='end' font-size='10'>"
       << detail::num(y_lo) << "</text>\n"
       << "<text x='" << ml - 4 << "' y='" << mt + 10 << "' text-anchor='end' font-size='10'>"
       << detail::num(y_hi) << "</text>\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = palette[si % 8];
        os << "<path fill='none' stroke='" << color << "' stroke-width='1.5' d='";
        bool pen_down = false;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                pen_down = false;
                continue;
            }
            os << (pen_down ? 'L' : 'M') << detail::num(px(s.x[i])) << ' '
               << detail::num(py(s.y[i]));
            pen_down = true;
        }
        os << "'/>\n";
        if (!s.label.empty()) {
            os << "<text x='" << w - mr - 8 << "' y='" << mt + 16 + 14 * si
               << "' text-anchor='end' font-size='11' fill='" << color << "'>" << s.label
               << "</text>\n";
        }
    }
    os << "</svg>\n";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("svg: cannot open " + path + " for writing");
    out << os.str();
}

/// Dense heatmap of values[iy][ix]; NaN cells are left blank.
inline void write_heatmap(const std::string& path,
                          const std::vector<std::vector<double>>& values,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label) {
    if (values.empty() || values.front().empty()) {
        throw ConfigError("svg: empty heatmap");
    }
    const std::size_t ny = values.size(), nx = values.front().size();
    double lo = 1e300, hi = -1e300;
    for (const auto& row : values) detail::finite_minmax(row, lo, hi);
    if (!(lo < hi)) { lo -= 0.5; hi += 0.5; }
    const double w = 720, h = 560, ml = 60, mr = 20, mt = 40, mb = 40;
    const double cw = (w - ml - mr) / static_cast<double>(nx);
    const double ch = (h - mt - mb) / static_cast<double>(ny);
    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
       << "' viewBox='0 0 " << w << ' ' << h << "'>\n"
       << "<rect width='100%' height='100%' fill='white'/>\n"
       << "<text x='" << w / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
       << " [" << detail::num(lo) << ", " << detail::num(hi) << "]</text>\n"
       << "<text x='" << w / 2 << "' y='" << h - 8 << "' text-anchor='middle' font-size='12'>"
       << x_label << "</text>\n"
       << "<text x='14' y='" << h / 2
       << "' text-anchor='middle' font-size='12' transform='rotate(-90 14 " << h / 2 << ")'>"
       << y_label << "</text>\n";
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < values[iy].size(); ++ix) {
            const double v = values[iy][ix];
            if (!std::isfinite(v)) continue;
            os << "<rect x='" << detail::num(ml + cw * static_cast<double>(ix)) << "' y='"
               << detail::num(h - mb - ch * static_cast<double>(iy + 1)) << "' width='"
               << detail::num(cw + 0.5) << "' height='" << detail::num(ch + 0.5) << "' fill='"
               << detail::colormap((v - lo) / (hi - lo)) << "'/>\n";
        }
    }
    os << "</svg>\n";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("svg: cannot open " + path + " for writing");
    out << os.str();
}

}  // namespace critchain::svg
