#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "softucb/csv.hpp"

namespace softucb {

struct ChartSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal deterministic SVG line chart. CSV files are the canonical
// artifacts; these charts are reading aids.
inline void write_line_chart(const std::string& path, const std::string& title,
                             const std::string& x_label, const std::string& y_label,
                             const std::vector<ChartSeries>& series) {
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                     "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    constexpr int kWidth = 860, kHeight = 520;
    constexpr int kLeft = 70, kRight = 200, kTop = 48, kBottom = 56;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;

    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    bool any = false;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!any) {
                x_min = x_max = s.x[i];
                y_min = y_max = s.y[i];
                any = true;
            }
            x_min = std::min(x_min, s.x[i]);
            x_max = std::max(x_max, s.x[i]);
            y_min = std::min(y_min, s.y[i]);
            y_max = std::max(y_max, s.y[i]);
        }
    }
    if (x_max - x_min < 1e-12) x_max = x_min + 1.0;
    if (y_max - y_min < 1e-12) y_max = y_min + 1.0;

    const auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
    const auto sy = [&](double y) {
        return kTop + plot_h - (y - y_min) / (y_max - y_min) * plot_h;
    };
    const auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return std::string(buf);
    };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("svg: cannot create '" + path + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

    // Axes with 5 ticks per side.
    out << "<g stroke=\"#333\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
        << kLeft + plot_w << "\" y2=\"" << kTop + plot_h << "\"/>\n";
    out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
        << kTop + plot_h << "\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = x_min + (x_max - x_min) * k / 5.0;
        const double yv = y_min + (y_max - y_min) * k / 5.0;
        out << "<line x1=\"" << num(sx(xv)) << "\" y1=\"" << kTop + plot_h << "\" x2=\""
            << num(sx(xv)) << "\" y2=\"" << kTop + plot_h + 5 << "\"/>\n";
        out << "<text x=\"" << num(sx(xv)) << "\" y=\"" << kTop + plot_h + 18
            << "\" text-anchor=\"middle\" stroke=\"none\" fill=\"#333\">" << num(xv)
            << "</text>\n";
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(sy(yv)) << "\" x2=\"" << kLeft
            << "\" y2=\"" << num(sy(yv)) << "\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(sy(yv) + 4)
            << "\" text-anchor=\"end\" stroke=\"none\" fill=\"#333\">" << num(yv)
            << "</text>\n";
    }
    out << "</g>\n";
    out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 14
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << x_label
        << "</text>\n";
    out << "<text x=\"18\" y=\"" << kTop + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << kTop + plot_h / 2 << ")\">" << y_label
        << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) out << ' ';
            out << num(sx(s.x[i])) << ',' << num(sy(s.y[i]));
        }
        out << "\"/>\n";
        const double ly = kTop + 14 + 18.0 * static_cast<double>(si);
        out << "<line x1=\"" << kLeft + plot_w + 12 << "\" y1=\"" << num(ly - 4) << "\" x2=\""
            << kLeft + plot_w + 36 << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kLeft + plot_w + 42 << "\" y=\"" << num(ly)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace softucb
