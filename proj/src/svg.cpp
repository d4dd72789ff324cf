#include "mbsed/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mbsed {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;
    double w = 0, h = 0;
    double left = 70, right = 20, top = 40, bottom = 55;
    double px(double x) const { return left + (x - x0) / (x1 - x0) * (w - left - right); }
    double py(double y) const { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); }
};

void pad(double& lo, double& hi) {
    if (!(hi > lo)) {
        const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
        lo -= d;
        hi += d;
    }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
}

void axes(std::ostringstream& os, const Frame& f, const PlotSpec& spec) {
    os << "<rect x='" << f.left << "' y='" << f.top << "' width='" << f.w - f.left - f.right << "' height='"
       << f.h - f.top - f.bottom << "' fill='none' stroke='black'/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = f.x0 + (f.x1 - f.x0) * i / 5.0;
        const double yv = f.y0 + (f.y1 - f.y0) * i / 5.0;
        os << "<text x='" << f.px(xv) << "' y='" << f.h - f.bottom + 16 << "' font-size='11' text-anchor='middle'>"
           << num(xv) << "</text>\n";
        os << "<text x='" << f.left - 6 << "' y='" << f.py(yv) + 4 << "' font-size='11' text-anchor='end'>" << num(yv)
           << "</text>\n";
    }
    os << "<text x='" << f.w / 2 << "' y='20' font-size='14' text-anchor='middle'>" << escape(spec.title) << "</text>\n";
    os << "<text x='" << f.w / 2 << "' y='" << f.h - 12 << "' font-size='12' text-anchor='middle'>"
       << escape(spec.x_label) << "</text>\n";
    os << "<text transform='translate(16," << f.h / 2 << ") rotate(-90)' font-size='12' text-anchor='middle'>"
       << escape(spec.y_label) << "</text>\n";
}

} // namespace

std::string line_plot_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
    double x0 = HUGE_VAL, x1 = -HUGE_VAL, y0 = HUGE_VAL, y1 = -HUGE_VAL;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            const double e = i < s.err.size() ? s.err[i] : 0.0;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i] - e);
            y1 = std::max(y1, s.y[i] + e);
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    pad(x0, x1);
    pad(y0, y1);
    Frame f{x0, x1, y0, y1, double(spec.width), double(spec.height)};

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << spec.width << "' height='" << spec.height << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    axes(os, f, spec);
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = kPalette[k % 8];
        os << "<polyline fill='none' stroke='" << colour << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i) os << num(f.px(s.x[i])) << ',' << num(f.py(s.y[i])) << ' ';
        os << "'/>\n";
        for (std::size_t i = 0; i < s.x.size() && i < s.err.size(); ++i) {
            os << "<line x1='" << num(f.px(s.x[i])) << "' x2='" << num(f.px(s.x[i])) << "' y1='"
               << num(f.py(s.y[i] - s.err[i])) << "' y2='" << num(f.py(s.y[i] + s.err[i])) << "' stroke='" << colour
               << "'/>\n";
        }
        os << "<text x='" << f.w - f.right - 8 << "' y='" << f.top + 16 + 15 * k << "' font-size='11' fill='" << colour
           << "' text-anchor='end'>" << escape(s.label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string heatmap_svg(const PlotSpec& spec, const std::vector<double>& x, const std::vector<double>& y,
                        const std::vector<std::vector<double>>& values) {
    if (x.size() < 2 || y.size() < 2) throw std::invalid_argument("heat map needs a 2x2 grid at least");
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (const auto& row : values)
        for (double v : row) lo = std::min(lo, v), hi = std::max(hi, v);
    const double dx = (x.back() - x.front()) / double(x.size() - 1);
    const double dy = (y.back() - y.front()) / double(y.size() - 1);
    Frame f{x.front() - dx / 2, x.back() + dx / 2, y.front() - dy / 2, y.back() + dy / 2, double(spec.width),
            double(spec.height)};
    f.right = 90;

    std::ostringstream os;
    os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << spec.width << "' height='" << spec.height << "'>\n";
    os << "<rect width='100%' height='100%' fill='white'/>\n";
    for (std::size_t iy = 0; iy < y.size(); ++iy) {
        for (std::size_t ix = 0; ix < x.size(); ++ix) {
            const double t = hi > lo ? (values[iy][ix] - lo) / (hi - lo) : 0.5;
            const int r = static_cast<int>(255 * t), b = static_cast<int>(255 * (1 - t));
            const double px0 = f.px(x[ix] - dx / 2), px1 = f.px(x[ix] + dx / 2);
            const double py0 = f.py(y[iy] + dy / 2), py1 = f.py(y[iy] - dy / 2);
            os << "<rect x='" << num(px0) << "' y='" << num(py0) << "' width='" << num(px1 - px0) << "' height='"
               << num(py1 - py0) << "' fill='rgb(" << r << ",64," << b << ")'/>\n";
        }
    }
    axes(os, f, spec);
    os << "<text x='" << f.w - 80 << "' y='" << f.top + 12 << "' font-size='11'>max " << num(hi) << "</text>\n";
    os << "<text x='" << f.w - 80 << "' y='" << f.h - f.bottom << "' font-size='11'>min " << num(lo) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

} // namespace mbsed
