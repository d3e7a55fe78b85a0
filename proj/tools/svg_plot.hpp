#pragma once

// Minimal SVG line charts: one chart per metric, x = window (categorical,
// in sweep order), one polyline per room. "n/a" points are skipped.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "occupancy/metrics.hpp"
#include "occupancy/textio.hpp"

namespace occupancy {

inline std::vector<std::filesystem::path> write_metric_plots(
    const std::filesystem::path& out, const std::vector<MetricsReport>& reports) {
    struct Panel {
        const char* file;
        const char* title;
        std::optional<double> (*value)(const MetricsReport&);
    };
    const Panel panels[] = {
        {"figure_bce.svg", "Binary cross-entropy",
         [](const MetricsReport& r) -> std::optional<double> { return r.bce; }},
        {"figure_auroc.svg", "AUROC", [](const MetricsReport& r) { return r.auroc; }},
        {"figure_avg_precision.svg", "Average precision",
         [](const MetricsReport& r) { return r.average_precision; }},
    };

    std::vector<int> windows;
    std::vector<std::string> rooms;
    for (const auto& r : reports) {
        if (std::find(windows.begin(), windows.end(), r.window_minutes) == windows.end()) {
            windows.push_back(r.window_minutes);
        }
        if (std::find(rooms.begin(), rooms.end(), r.room_id) == rooms.end()) {
            rooms.push_back(r.room_id);
        }
    }
    const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    constexpr double W = 480, H = 320, L = 60, R = 110, T = 30, B = 40;

    std::vector<std::filesystem::path> written;
    for (const auto& panel : panels) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& r : reports) {
            if (auto v = panel.value(r)) {
                lo = std::min(lo, *v);
                hi = std::max(hi, *v);
            }
        }
        if (!(lo <= hi)) lo = 0, hi = 1;
        if (hi - lo < 1e-9) lo -= 0.5, hi += 0.5;

        auto px = [&](std::size_t i) {
            return windows.size() > 1 ? L + (W - L - R) * static_cast<double>(i) /
                                                static_cast<double>(windows.size() - 1)
                                      : (W - R + L) / 2;
        };
        auto py = [&](double v) { return T + (H - T - B) * (hi - v) / (hi - lo); };

        std::ostringstream svg;
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
            << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
        svg << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
            << panel.title << "</text>\n";
        svg << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
            << H - B << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
            << "\" stroke=\"black\"/>\n";
        for (std::size_t i = 0; i < windows.size(); ++i) {
            svg << "<text x=\"" << px(i) << "\" y=\"" << H - B + 15 << "\" text-anchor=\"middle\">"
                << windows[i] << "</text>\n";
        }
        svg << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 5
            << "\" text-anchor=\"middle\">window (minutes)</text>\n";
        svg << "<text x=\"" << L - 5 << "\" y=\"" << py(hi) + 4 << "\" text-anchor=\"end\">"
            << format_fixed(hi, 3) << "</text>\n";
        svg << "<text x=\"" << L - 5 << "\" y=\"" << py(lo) + 4 << "\" text-anchor=\"end\">"
            << format_fixed(lo, 3) << "</text>\n";

        for (std::size_t k = 0; k < rooms.size(); ++k) {
            const char* color = colors[k % std::size(colors)];
            std::ostringstream pts;
            for (std::size_t i = 0; i < windows.size(); ++i) {
                for (const auto& r : reports) {
                    if (r.room_id != rooms[k] || r.window_minutes != windows[i]) continue;
                    if (auto v = panel.value(r)) pts << px(i) << ',' << py(*v) << ' ';
                }
            }
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\""
                << pts.str() << "\"/>\n";
            svg << "<text x=\"" << W - R + 10 << "\" y=\"" << T + 14 * static_cast<double>(k) + 10
                << "\" fill=\"" << color << "\">" << rooms[k] << "</text>\n";
        }
        svg << "</svg>\n";
        const auto path = out / panel.file;
        write_file_atomic(path, svg.str());
        written.push_back(path);
    }
    return written;
}

}  // namespace occupancy
