#include "rainbc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "rainbc/csv.hpp"

namespace rainbc::plot {

namespace {

constexpr double kW = 860, kH = 480;
constexpr double kLeft = 70, kRight = 160, kTop = 50, kBottom = 55;

const char* kPalette[] = {"#1b6ca8", "#d1495b", "#2e933c", "#edae49",
                          "#6f42c1", "#17a2b8", "#555555", "#b35900"};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo < hi)) {
            lo -= 1.0;
            hi += 1.0;
        }
    }
};

std::string csv_long(const std::vector<Series>& series) {
    std::string out = "series,x,y\n";
    for (const auto& s : series)
        for (const auto& [x, y] : s.points)
            out += s.name + ',' + num(x) + ',' + num(y) + '\n';
    return out;
}

std::string header(const std::string& title) {
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      num(kW) + "\" height=\"" + num(kH) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(kW / 2) +
           "\" y=\"26\" font-family=\"sans-serif\" font-size=\"16\" "
           "text-anchor=\"middle\">" +
           esc(title) + "</text>\n";
    return svg;
}

void axes(std::string& svg, const Range& xr, const Range& yr,
          const std::string& x_label, const std::string& y_label) {
    const double px0 = kLeft, px1 = kW - kRight, py0 = kH - kBottom, py1 = kTop;
    svg += "<line x1=\"" + num(px0) + "\" y1=\"" + num(py0) + "\" x2=\"" +
           num(px1) + "\" y2=\"" + num(py0) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + num(px0) + "\" y1=\"" + num(py0) + "\" x2=\"" +
           num(px0) + "\" y2=\"" + num(py1) + "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / 5.0;
        const double fy = yr.lo + (yr.hi - yr.lo) * i / 5.0;
        const double px = px0 + (px1 - px0) * i / 5.0;
        const double py = py0 - (py0 - py1) * i / 5.0;
        svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(py0) + "\" x2=\"" +
               num(px) + "\" y2=\"" + num(py0 + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(px) + "\" y=\"" + num(py0 + 20) +
               "\" font-family=\"sans-serif\" font-size=\"11\" "
               "text-anchor=\"middle\">" +
               num(std::round(fx * 1000) / 1000) + "</text>\n";
        svg += "<line x1=\"" + num(px0 - 5) + "\" y1=\"" + num(py) + "\" x2=\"" +
               num(px0) + "\" y2=\"" + num(py) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(px0 - 8) + "\" y=\"" + num(py + 4) +
               "\" font-family=\"sans-serif\" font-size=\"11\" "
               "text-anchor=\"end\">" +
               num(std::round(fy * 1000) / 1000) + "</text>\n";
    }
    svg += "<text x=\"" + num((px0 + px1) / 2) + "\" y=\"" + num(kH - 12) +
           "\" font-family=\"sans-serif\" font-size=\"13\" "
           "text-anchor=\"middle\">" +
           esc(x_label) + "</text>\n";
    svg += "<text x=\"18\" y=\"" + num((py0 + py1) / 2) +
           "\" font-family=\"sans-serif\" font-size=\"13\" "
           "text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           num((py0 + py1) / 2) + ")\">" +
           esc(y_label) + "</text>\n";
}

void legend(std::string& svg, const std::vector<Series>& series) {
    double y = kTop + 10;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % 8];
        svg += "<rect x=\"" + num(kW - kRight + 16) + "\" y=\"" + num(y - 9) +
               "\" width=\"14\" height=\"4\" fill=\"" + color + "\"/>\n";
        svg += "<text x=\"" + num(kW - kRight + 36) + "\" y=\"" + num(y - 3) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" +
               esc(series[i].name) + "</text>\n";
        y += 18;
    }
}

double sx(double x, const Range& xr) {
    return kLeft + (kW - kRight - kLeft) * (x - xr.lo) / (xr.hi - xr.lo);
}
double sy(double y, const Range& yr) {
    return kH - kBottom - (kH - kBottom - kTop) * (y - yr.lo) / (yr.hi - yr.lo);
}

}  // namespace

void write_line_chart(const std::string& base, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series, bool step) {
    Range xr, yr;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            xr.include(x);
            yr.include(y);
        }
    xr.finish();
    yr.finish();

    std::string svg = header(title);
    axes(svg, xr, yr, x_label, y_label);
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].points.empty()) continue;
        std::string pts;
        double prev_y = 0;
        bool first = true;
        for (const auto& [x, y] : series[i].points) {
            if (step && !first)
                pts += num(sx(x, xr)) + ',' + num(sy(prev_y, yr)) + ' ';
            pts += num(sx(x, xr)) + ',' + num(sy(y, yr)) + ' ';
            prev_y = y;
            first = false;
        }
        svg += "<polyline fill=\"none\" stroke=\"" +
               std::string(kPalette[i % 8]) + "\" stroke-width=\"1.6\" points=\"" +
               pts + "\"/>\n";
    }
    legend(svg, series);
    svg += "</svg>\n";
    io::write_file(base + ".svg", svg);
    io::write_file(base + ".csv", csv_long(series));
}

void write_bar_chart(const std::string& base, const std::string& title,
                     const std::vector<std::string>& groups,
                     const std::vector<Series>& series) {
    Range yr;
    yr.include(0.0);
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) yr.include(y);
    yr.finish();
    Range xr{-0.5, static_cast<double>(groups.size()) - 0.5};

    std::string svg = header(title);
    axes(svg, xr, yr, "", "");
    const double group_w = (kW - kRight - kLeft) / std::max<std::size_t>(1, groups.size());
    const double bar_w = group_w * 0.8 / std::max<std::size_t>(1, series.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        svg += "<text x=\"" + num(kLeft + group_w * (g + 0.5)) + "\" y=\"" +
               num(kH - kBottom + 34) +
               "\" font-family=\"sans-serif\" font-size=\"12\" "
               "text-anchor=\"middle\">" +
               esc(groups[g]) + "</text>\n";
        for (std::size_t i = 0; i < series.size(); ++i) {
            if (g >= series[i].points.size()) continue;
            const double y = series[i].points[g].second;
            const double x0 =
                kLeft + group_w * g + group_w * 0.1 + bar_w * static_cast<double>(i);
            const double y_zero = sy(std::max(0.0, yr.lo), yr);
            const double y_val = sy(y, yr);
            svg += "<rect x=\"" + num(x0) + "\" y=\"" + num(std::min(y_val, y_zero)) +
                   "\" width=\"" + num(bar_w * 0.9) + "\" height=\"" +
                   num(std::fabs(y_zero - y_val)) + "\" fill=\"" +
                   kPalette[i % 8] + "\"/>\n";
        }
    }
    legend(svg, series);
    svg += "</svg>\n";
    io::write_file(base + ".svg", svg);

    std::string csv = "series,group,y\n";
    for (const auto& s : series)
        for (std::size_t g = 0; g < s.points.size() && g < groups.size(); ++g)
            csv += s.name + ',' + groups[g] + ',' + num(s.points[g].second) + '\n';
    io::write_file(base + ".csv", csv);
}

void write_scatter(const std::string& base, const std::string& title,
                   const std::string& x_label, const std::string& y_label,
                   const std::vector<Series>& series, bool diagonal) {
    Range xr, yr;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            xr.include(x);
            yr.include(y);
        }
    if (diagonal) {
        xr.include(0.0);
        yr.include(0.0);
        xr.include(1.0);
        yr.include(1.0);
    }
    xr.finish();
    yr.finish();

    std::string svg = header(title);
    axes(svg, xr, yr, x_label, y_label);
    if (diagonal) {
        const double lo = std::max(xr.lo, yr.lo), hi = std::min(xr.hi, yr.hi);
        svg += "<line x1=\"" + num(sx(lo, xr)) + "\" y1=\"" + num(sy(lo, yr)) +
               "\" x2=\"" + num(sx(hi, xr)) + "\" y2=\"" + num(sy(hi, yr)) +
               "\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        for (const auto& [x, y] : series[i].points) {
            svg += "<circle cx=\"" + num(sx(x, xr)) + "\" cy=\"" +
                   num(sy(y, yr)) + "\" r=\"2.6\" fill=\"" + kPalette[i % 8] +
                   "\" fill-opacity=\"0.7\"/>\n";
        }
    }
    legend(svg, series);
    svg += "</svg>\n";
    io::write_file(base + ".svg", svg);
    io::write_file(base + ".csv", csv_long(series));
}

}  // namespace rainbc::plot
