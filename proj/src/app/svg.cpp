#include "zice/app/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "zice/errors.hpp"

namespace zice::app {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 30.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 55.0;

std::string num(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.6g", v);
    return buffer;
}

std::string escape(const std::string& text) {
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

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void settle() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        } else if (lo == hi) {
            const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
            lo -= pad;
            hi += pad;
        }
    }
};

/// Plot-area transform.
struct Frame {
    Range x;
    Range y;
    double right_margin = kRight;

    double px(double v) const {
        return kLeft + (v - x.lo) / (x.hi - x.lo) * (kWidth - kLeft - right_margin);
    }
    double py(double v) const {
        return kHeight - kBottom - (v - y.lo) / (y.hi - y.lo) * (kHeight - kTop - kBottom);
    }
};

std::vector<double> ticks(const Range& r) {
    const double span = r.hi - r.lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> out;
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-9 * span; v += step) {
        out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
    }
    return out;
}

void open(std::ostringstream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">"
        << escape(title) << "</text>\n";
}

void axes(std::ostringstream& out, const Frame& f, const std::string& xl, const std::string& yl) {
    const double x0 = kLeft;
    const double x1 = kWidth - f.right_margin;
    const double y0 = kHeight - kBottom;
    const double y1 = kTop;
    out << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\""
        << y0 - y1 << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (double v : ticks(f.x)) {
        const double p = f.px(v);
        out << "<line x1=\"" << num(p) << "\" y1=\"" << y0 << "\" x2=\"" << num(p) << "\" y2=\""
            << y0 + 5 << "\" stroke=\"black\"/>";
        out << "<text x=\"" << num(p) << "\" y=\"" << y0 + 18 << "\" text-anchor=\"middle\">"
            << num(v) << "</text>\n";
    }
    for (double v : ticks(f.y)) {
        const double p = f.py(v);
        out << "<line x1=\"" << x0 - 5 << "\" y1=\"" << num(p) << "\" x2=\"" << x0 << "\" y2=\""
            << num(p) << "\" stroke=\"black\"/>";
        out << "<text x=\"" << x0 - 8 << "\" y=\"" << num(p + 4) << "\" text-anchor=\"end\">"
            << num(v) << "</text>\n";
    }
    out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(xl) << "</text>\n";
    out << "<text transform=\"translate(16 " << (y0 + y1) / 2
        << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << escape(yl) << "</text>\n";
    out << "</g>\n";
}

void polyline(std::ostringstream& out, const Frame& f, const Series& s) {
    if (s.x.size() != s.y.size()) {
        throw ConfigError("svg series \"" + s.label + "\" has mismatched x/y lengths");
    }
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (s.dashed) {
        out << " stroke-dasharray=\"6 4\"";
    }
    out << " points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        out << (first ? "" : " ") << num(f.px(s.x[i])) << ',' << num(f.py(s.y[i]));
        first = false;
    }
    out << "\"/>\n";
}

void legend(std::ostringstream& out, const std::vector<Series>& series, double x_right) {
    double y = kTop + 16;
    out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (const auto& s : series) {
        if (s.label.empty()) continue;
        out << "<line x1=\"" << x_right - 150 << "\" y1=\"" << y - 4 << "\" x2=\"" << x_right - 128
            << "\" y2=\"" << y - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\""
            << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>";
        out << "<text x=\"" << x_right - 122 << "\" y=\"" << y << "\">" << escape(s.label)
            << "</text>\n";
        y += 16;
    }
    out << "</g>\n";
}

std::string diverging(double v, double scale) {
    const double t = scale > 0.0 ? std::clamp(v / scale, -1.0, 1.0) : 0.0;
    // white at zero, red above, blue below
    const double a = std::abs(t);
    int r = 255;
    int g = static_cast<int>(std::lround(255.0 * (1.0 - a)));
    int b = 255;
    if (t > 0.0) {
        b = g;
    } else {
        r = g;
    }
    char buffer[8];
    std::snprintf(buffer, sizeof buffer, "#%02x%02x%02x", r, g, b);
    return buffer;
}

/// Cell boundaries halfway between neighbouring centres.
std::vector<double> edges(const std::vector<double>& centres) {
    std::vector<double> e(centres.size() + 1);
    if (centres.size() == 1) {
        const double pad = centres[0] == 0.0 ? 0.5 : 0.05 * std::abs(centres[0]);
        return {centres[0] - pad, centres[0] + pad};
    }
    for (std::size_t i = 1; i < centres.size(); ++i) {
        e[i] = 0.5 * (centres[i - 1] + centres[i]);
    }
    e.front() = centres.front() - (e[1] - centres.front());
    e.back() = centres.back() + (centres.back() - e[centres.size() - 1]);
    return e;
}

} // namespace

std::string render_line_plot(const LinePlot& plot) {
    Frame f;
    for (const auto& s : plot.series) {
        for (double v : s.x) f.x.include(v);
        for (double v : s.y) f.y.include(v);
    }
    f.x.settle();
    f.y.settle();
    const double pad = 0.05 * (f.y.hi - f.y.lo);
    f.y.lo -= pad;
    f.y.hi += pad;

    std::ostringstream out;
    open(out, plot.title);
    axes(out, f, plot.x_label, plot.y_label);
    if (f.y.lo < 0.0 && f.y.hi > 0.0) {
        out << "<line x1=\"" << kLeft << "\" y1=\"" << num(f.py(0.0)) << "\" x2=\""
            << kWidth - f.right_margin << "\" y2=\"" << num(f.py(0.0))
            << "\" stroke=\"#999999\" stroke-width=\"0.8\"/>\n";
    }
    for (const auto& s : plot.series) {
        polyline(out, f, s);
    }
    legend(out, plot.series, kWidth - f.right_margin);
    out << "</svg>\n";
    return out.str();
}

std::string render_heatmap(const Heatmap& map) {
    if (map.values.size() != map.x_axis.size() * map.y_axis.size() || map.values.empty()) {
        throw ConfigError("heatmap values do not match the axes");
    }
    const auto xe = edges(map.x_axis);
    const auto ye = edges(map.y_axis);
    Frame f;
    f.right_margin = 110.0;
    f.x.lo = xe.front();
    f.x.hi = xe.back();
    f.y.lo = ye.front();
    f.y.hi = ye.back();
    double scale = 0.0;
    for (double v : map.values) {
        if (std::isfinite(v)) scale = std::max(scale, std::abs(v));
    }

    std::ostringstream out;
    open(out, map.title);
    out << "<g shape-rendering=\"crispEdges\">\n";
    const std::size_t ny = map.y_axis.size();
    for (std::size_t i = 0; i < map.x_axis.size(); ++i) {
        for (std::size_t k = 0; k < ny; ++k) {
            const double x0 = f.px(xe[i]);
            const double x1 = f.px(xe[i + 1]);
            const double y0 = f.py(ye[k + 1]);
            const double y1 = f.py(ye[k]);
            out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0)
                << "\" height=\"" << num(y1 - y0) << "\" fill=\""
                << diverging(map.values[i * ny + k], scale) << "\"/>\n";
        }
    }
    out << "</g>\n";
    out << "<clipPath id=\"plot\"><rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
        << kWidth - kLeft - f.right_margin << "\" height=\"" << kHeight - kTop - kBottom
        << "\"/></clipPath>\n<g clip-path=\"url(#plot)\">\n";
    for (const auto& s : map.overlays) {
        polyline(out, f, s);
    }
    out << "</g>\n";
    axes(out, f, map.x_label, map.y_label);
    legend(out, map.overlays, kWidth - f.right_margin);

    // colour bar
    const double bx = kWidth - f.right_margin + 25;
    const double top = kTop;
    const double height = kHeight - kTop - kBottom;
    const int steps = 40;
    for (int s = 0; s < steps; ++s) {
        const double v = scale * (1.0 - 2.0 * (s + 0.5) / steps);
        out << "<rect x=\"" << bx << "\" y=\"" << num(top + height * s / steps) << "\" width=\"14\" height=\""
            << num(height / steps + 0.5) << "\" fill=\"" << diverging(v, scale) << "\"/>\n";
    }
    out << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<text x=\"" << bx + 18 << "\" y=\"" << top + 8 << "\">" << num(scale) << "</text>\n";
    out << "<text x=\"" << bx + 18 << "\" y=\"" << num(top + height / 2 + 4) << "\">0</text>\n";
    out << "<text x=\"" << bx + 18 << "\" y=\"" << top + height << "\">" << num(-scale) << "</text>\n";
    out << "<text transform=\"translate(" << bx + 7 << ' ' << top + height + 20
        << ")\" text-anchor=\"middle\">" << escape(map.value_label) << "</text>\n";
    out << "</g>\n</svg>\n";
    return out.str();
}

} // namespace zice::app
