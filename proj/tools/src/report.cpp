// Copyright 2026 The Ethmerge Authors
// SPDX-License-Identifier: Apache-2.0

#include "ethmerge/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ethmerge/error.hpp"
#include "ethmerge/types.hpp"

namespace ethmerge::cli {

std::vector<SeriesPoint> systematic_sample(std::span<const SeriesPoint> series, std::size_t sample) {
    if (sample == 0) {
        fail(Errc::kInvalidConfig, "sample size must be positive");
    }
    const std::size_t step = std::max<std::size_t>(1, (series.size() + sample - 1) / sample);
    std::vector<SeriesPoint> out;
    for (std::size_t i = 0; i < series.size(); i += step) {
        out.push_back(series[i]);
    }
    return out;
}

namespace {

    std::string cell(double v) { return std::isfinite(v) ? format_double(v) : std::string(); }

    std::string fixed(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return buf;
    }

    std::string tick_label(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return buf;
    }

    std::string escape(const std::string& text) {
        std::string out;
        for (const char c : text) {
            switch (c) {
                case '&': out += "&amp;"; break;
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                case '"': out += "&quot;"; break;
                default: out.push_back(c);
            }
        }
        return out;
    }

    constexpr double kWidth = 960.0;
    constexpr double kHeight = 480.0;
    constexpr double kLeft = 80.0;
    constexpr double kRight = 150.0;
    constexpr double kTop = 40.0;
    constexpr double kBottom = 50.0;

    struct Series {
        double SeriesPoint::*field;
        const char* name;
        const char* color;
        const char* dash;  // empty for a solid line
    };

    constexpr Series kSeries[] = {
        {&SeriesPoint::actual, "actual", "#000000", ""},
        {&SeriesPoint::estimated, "estimated", "#d62728", "6 4"},
        {&SeriesPoint::predicted, "predicted", "#2ca02c", "6 4"},
    };

}  // namespace

std::string series_csv(std::span<const SeriesPoint> points) {
    std::ostringstream out;
    out << "index,block_number,timestamp,actual,estimated,predicted\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const SeriesPoint& p = points[i];
        out << i << ',' << p.block_number << ',' << p.timestamp << ',' << cell(p.actual) << ','
            << cell(p.estimated) << ',' << cell(p.predicted) << '\n';
    }
    return out.str();
}

std::string series_svg(std::span<const SeriesPoint> points, const ChartLabels& labels) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const SeriesPoint& p : points) {
        for (const Series& s : kSeries) {
            const double v = p.*s.field;
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (!(lo <= hi)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo <= 0.0) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const double n = static_cast<double>(std::max<std::size_t>(points.size(), 2) - 1);
    const auto x_of = [&](std::size_t i) { return kLeft + plot_w * static_cast<double>(i) / n; };
    const auto y_of = [&](double v) { return kTop + plot_h * (hi - v) / (hi - lo); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    out << "<text x=\"" << fixed(kLeft) << "\" y=\"24\" font-size=\"15\">" << escape(labels.title) << "</text>\n";

    // Axes and grid.
    out << "<g stroke=\"#cccccc\" stroke-dasharray=\"2 3\">\n";
    constexpr int kYTicks = 5;
    for (int t = 0; t <= kYTicks; ++t) {
        const double v = lo + (hi - lo) * t / kYTicks;
        out << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(y_of(v)) << "\" x2=\"" << fixed(kLeft + plot_w)
            << "\" y2=\"" << fixed(y_of(v)) << "\"/>\n";
    }
    out << "</g>\n";
    out << "<g stroke=\"#000000\">\n";
    out << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop) << "\" x2=\"" << fixed(kLeft) << "\" y2=\""
        << fixed(kTop + plot_h) << "\"/>\n";
    out << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(kTop + plot_h) << "\" x2=\"" << fixed(kLeft + plot_w)
        << "\" y2=\"" << fixed(kTop + plot_h) << "\"/>\n";
    out << "</g>\n";
    out << "<g text-anchor=\"end\">\n";
    for (int t = 0; t <= kYTicks; ++t) {
        const double v = lo + (hi - lo) * t / kYTicks;
        out << "<text x=\"" << fixed(kLeft - 6) << "\" y=\"" << fixed(y_of(v) + 4) << "\">" << tick_label(v)
            << "</text>\n";
    }
    out << "</g>\n";
    out << "<g text-anchor=\"middle\">\n";
    const std::size_t x_step = std::max<std::size_t>(1, points.size() / 10);
    for (std::size_t i = 0; i < points.size(); i += x_step) {
        out << "<text x=\"" << fixed(x_of(i)) << "\" y=\"" << fixed(kTop + plot_h + 18) << "\">" << i << "</text>\n";
    }
    out << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << fixed(kHeight - 10)
        << "\">sample index</text>\n";
    out << "</g>\n";
    out << "<text transform=\"translate(18 " << fixed(kTop + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
        << escape(labels.y_axis) << "</text>\n";

    // Series, one polyline per run of defined values.
    for (const Series& s : kSeries) {
        out << "<g id=\"" << s.name << "\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
        if (*s.dash != '\0') {
            out << " stroke-dasharray=\"" << s.dash << '"';
        }
        out << ">\n";
        std::string run;
        const auto flush = [&] {
            if (!run.empty()) {
                out << "<polyline points=\"" << run << "\"/>\n";
                run.clear();
            }
        };
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double v = points[i].*s.field;
            if (!std::isfinite(v)) {
                flush();
                continue;
            }
            if (!run.empty()) {
                run.push_back(' ');
            }
            run += fixed(x_of(i)) + ',' + fixed(y_of(v));
        }
        flush();
        out << "</g>\n";
    }

    // Legend.
    double ly = kTop + 10;
    for (const Series& s : kSeries) {
        const double lx = kLeft + plot_w + 16;
        out << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(lx + 30) << "\" y2=\""
            << fixed(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
        if (*s.dash != '\0') {
            out << " stroke-dasharray=\"" << s.dash << '"';
        }
        out << "/>\n";
        out << "<text x=\"" << fixed(lx + 36) << "\" y=\"" << fixed(ly + 4) << "\">" << s.name << "</text>\n";
        ly += 20;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace ethmerge::cli
