#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace bergman {

struct SvgSeries {
    std::string label;
    std::string color;
    bool cross = false;  // crosses for computed values, dots for approximants
    std::vector<std::pair<double, double>> points;
};

namespace detail {

inline std::string fmt1(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

}  // namespace detail

// Self-contained log-log scatter plot. Decade grid lines on both axes.
inline std::string render_loglog_scatter(const std::string& title, const std::string& xlabel,
                                         const std::string& ylabel,
                                         const std::vector<SvgSeries>& series) {
    const double W = 640, H = 480, ml = 70, mr = 30, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (x <= 0 || y <= 0) continue;
            xmin = std::min(xmin, std::log10(x));
            xmax = std::max(xmax, std::log10(x));
            ymin = std::min(ymin, std::log10(y));
            ymax = std::max(ymax, std::log10(y));
        }
    }
    if (xmin > xmax) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
    xmin = std::floor(xmin - 0.05);
    xmax = std::ceil(xmax + 0.05);
    ymin = std::floor(ymin - 0.05);
    ymax = std::ceil(ymax + 0.05);
    auto px = [&](double lx) { return ml + (lx - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double ly) { return H - mb - (ly - ymin) / (ymax - ymin) * (H - mt - mb); };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    svg += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    svg += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + title +
           "</text>\n";
    for (int d = static_cast<int>(xmin); d <= static_cast<int>(xmax); ++d) {
        const double x = px(d);
        svg += "<line x1=\"" + detail::fmt1(x) + "\" y1=\"" + detail::fmt1(py(ymin)) +
               "\" x2=\"" + detail::fmt1(x) + "\" y2=\"" + detail::fmt1(py(ymax)) +
               "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + detail::fmt1(x) + "\" y=\"" + detail::fmt1(H - mb + 18) +
               "\" text-anchor=\"middle\" font-size=\"11\">1e" + std::to_string(d) +
               "</text>\n";
    }
    for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); ++d) {
        const double y = py(d);
        svg += "<line x1=\"" + detail::fmt1(px(xmin)) + "\" y1=\"" + detail::fmt1(y) +
               "\" x2=\"" + detail::fmt1(px(xmax)) + "\" y2=\"" + detail::fmt1(y) +
               "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + detail::fmt1(ml - 8) + "\" y=\"" + detail::fmt1(y + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">1e" + std::to_string(d) +
               "</text>\n";
    }
    svg += "<rect x=\"" + detail::fmt1(ml) + "\" y=\"" + detail::fmt1(mt) + "\" width=\"" +
           detail::fmt1(W - ml - mr) + "\" height=\"" + detail::fmt1(H - mt - mb) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    svg += "<text x=\"320\" y=\"" + detail::fmt1(H - 12) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + xlabel + "</text>\n";
    svg += "<text x=\"18\" y=\"240\" text-anchor=\"middle\" font-size=\"13\" "
           "transform=\"rotate(-90 18 240)\">" + ylabel + "</text>\n";

    double ly = mt + 16;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            if (x <= 0 || y <= 0) continue;
            const double cx = px(std::log10(x)), cy = py(std::log10(y));
            if (s.cross) {
                svg += "<path d=\"M" + detail::fmt1(cx - 3.5) + " " + detail::fmt1(cy - 3.5) +
                       " L" + detail::fmt1(cx + 3.5) + " " + detail::fmt1(cy + 3.5) + " M" +
                       detail::fmt1(cx - 3.5) + " " + detail::fmt1(cy + 3.5) + " L" +
                       detail::fmt1(cx + 3.5) + " " + detail::fmt1(cy - 3.5) +
                       "\" stroke=\"" + s.color + "\" stroke-width=\"1.4\"/>\n";
            } else {
                svg += "<circle cx=\"" + detail::fmt1(cx) + "\" cy=\"" + detail::fmt1(cy) +
                       "\" r=\"3\" fill=\"" + s.color + "\"/>\n";
            }
        }
        svg += "<text x=\"" + detail::fmt1(W - mr - 8) + "\" y=\"" + detail::fmt1(ly) +
               "\" text-anchor=\"end\" font-size=\"12\" fill=\"" + s.color + "\">" +
               s.label + "</text>\n";
        ly += 16;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace bergman
