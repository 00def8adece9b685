#include "qeilab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace qeilab::cli {

namespace {

void check_cell(const std::string& cell) {
    if (cell.find_first_of(",\n\r\"") != std::string::npos)
        throw std::invalid_argument(
            "CsvWriter: cells must not contain commas, quotes, or line breaks");
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> columns) : width_(columns.size()) {
    if (columns.empty()) throw std::invalid_argument("CsvWriter: need at least one column");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        check_cell(columns[i]);
        if (i) body_ += ',';
        body_ += columns[i];
    }
    body_ += '\n';
}

std::string CsvWriter::format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void CsvWriter::add_row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format(v));
    add_row(cells);
}

void CsvWriter::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != width_)
        throw std::invalid_argument("CsvWriter: row has " + std::to_string(cells.size()) +
                                    " cells, expected " + std::to_string(width_));
    for (std::size_t i = 0; i < cells.size(); ++i) {
        check_cell(cells[i]);
        if (i) body_ += ',';
        body_ += cells[i];
    }
    body_ += '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// SVG rendering

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 80.0;    // plot box
constexpr double kRight = 770.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 540.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                "#9467bd", "#ff7f0e", "#8c564b"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string fmt_num(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_px(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
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

struct AxisScale {
    bool log = false;
    double lo = 0.0;  // log axes store log10 of the data limits
    double hi = 1.0;

    double fraction(double v) const {
        const double t = log ? std::log10(v) : v;
        return (t - lo) / (hi - lo);
    }
};

AxisScale fit_axis(const PlotSpec& plot, bool vertical, bool log_axis) {
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    for (const Series& s : plot.series) {
        const std::vector<double>& vals = vertical ? s.y : s.x;
        for (double v : vals) {
            if (!std::isfinite(v))
                throw std::invalid_argument("render_svg: non-finite value in series '" +
                                            s.name + "'");
            if (log_axis && !(v > 0.0))
                throw std::invalid_argument(
                    "render_svg: logarithmic axis requires positive values (series '" +
                    s.name + "')");
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
    }
    AxisScale ax;
    ax.log = log_axis;
    double lo = log_axis ? std::log10(mn) : mn;
    double hi = log_axis ? std::log10(mx) : mx;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(lo))) {
        const double pad = log_axis ? 0.5 : 0.05 * std::max(1.0, std::abs(lo));
        lo -= pad;
        hi += pad;
    } else {
        const double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    ax.lo = lo;
    ax.hi = hi;
    return ax;
}

struct Tick {
    double pos;  // in axis coordinates (log10 space on log axes)
    std::string label;
};

std::vector<Tick> make_ticks(const AxisScale& ax) {
    std::vector<Tick> ticks;
    if (ax.log) {
        const int d_lo = static_cast<int>(std::ceil(ax.lo));
        const int d_hi = static_cast<int>(std::floor(ax.hi));
        if (d_hi >= d_lo) {
            const int count = d_hi - d_lo + 1;
            const int stride = std::max(1, (count + 8) / 9);
            for (int d = d_lo; d <= d_hi; d += stride)
                ticks.push_back({static_cast<double>(d), fmt_num(std::pow(10.0, d))});
        }
        if (ticks.size() < 2) {
            ticks.clear();
            for (double t : {ax.lo, 0.5 * (ax.lo + ax.hi), ax.hi})
                ticks.push_back({t, fmt_num(std::pow(10.0, t))});
        }
        return ticks;
    }
    const double span = ax.hi - ax.lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double step = mag * (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0);
    double t = std::ceil(ax.lo / step) * step;
    for (; t <= ax.hi + 1e-9 * span; t += step) {
        double v = t;
        if (std::abs(v) < 1e-12 * span) v = 0.0;
        ticks.push_back({v, fmt_num(v)});
    }
    return ticks;
}

}  // namespace

std::string render_svg(const PlotSpec& plot) {
    if (plot.series.empty())
        throw std::invalid_argument("render_svg: plot has no series");
    for (const Series& s : plot.series) {
        if (s.x.empty()) throw std::invalid_argument("render_svg: empty series '" + s.name + "'");
        if (s.x.size() != s.y.size())
            throw std::invalid_argument("render_svg: series '" + s.name +
                                        "' has mismatched x/y sizes");
    }

    const AxisScale xs = fit_axis(plot, false, plot.log_x);
    const AxisScale ys = fit_axis(plot, true, plot.log_y);
    const auto px = [&](double v) { return kLeft + xs.fraction(v) * (kRight - kLeft); };
    const auto py = [&](double v) { return kBottom - ys.fraction(v) * (kBottom - kTop); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\" font-family=\"monospace\" font-size=\"12\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";

    // Gridlines and tick labels.
    for (const Tick& t : make_ticks(xs)) {
        const double x = kLeft + (t.pos - xs.lo) / (xs.hi - xs.lo) * (kRight - kLeft);
        svg += "<line x1=\"" + fmt_px(x) + "\" y1=\"" + fmt_px(kTop) + "\" x2=\"" + fmt_px(x) +
               "\" y2=\"" + fmt_px(kBottom) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt_px(x) + "\" y=\"" + fmt_px(kBottom + 18.0) +
               "\" text-anchor=\"middle\">" + xml_escape(t.label) + "</text>\n";
    }
    for (const Tick& t : make_ticks(ys)) {
        const double y = kBottom - (t.pos - ys.lo) / (ys.hi - ys.lo) * (kBottom - kTop);
        svg += "<line x1=\"" + fmt_px(kLeft) + "\" y1=\"" + fmt_px(y) + "\" x2=\"" +
               fmt_px(kRight) + "\" y2=\"" + fmt_px(y) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + fmt_px(kLeft - 8.0) + "\" y=\"" + fmt_px(y + 4.0) +
               "\" text-anchor=\"end\">" + xml_escape(t.label) + "</text>\n";
    }

    // Frame.
    svg += "<rect x=\"" + fmt_px(kLeft) + "\" y=\"" + fmt_px(kTop) + "\" width=\"" +
           fmt_px(kRight - kLeft) + "\" height=\"" + fmt_px(kBottom - kTop) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    // Series.
    for (std::size_t si = 0; si < plot.series.size(); ++si) {
        const Series& s = plot.series[si];
        const char* color = kPalette[si % kPaletteSize];
        std::string d = "M " + fmt_px(px(s.x[0])) + " " + fmt_px(py(s.y[0]));
        for (std::size_t i = 1; i < s.x.size(); ++i) {
            if (s.step) {
                d += " H " + fmt_px(px(s.x[i]));
                d += " V " + fmt_px(py(s.y[i]));
            } else {
                d += " L " + fmt_px(px(s.x[i])) + " " + fmt_px(py(s.y[i]));
            }
        }
        svg += "<path d=\"" + d + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.5\"/>\n";
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg += "<circle cx=\"" + fmt_px(px(s.x[i])) + "\" cy=\"" + fmt_px(py(s.y[i])) +
                       "\" r=\"3\" fill=\"" + std::string(color) + "\"/>\n";
        }
    }

    // Legend (top-left corner of the plot box).
    for (std::size_t si = 0; si < plot.series.size(); ++si) {
        const double y = kTop + 16.0 + 16.0 * static_cast<double>(si);
        const char* color = kPalette[si % kPaletteSize];
        svg += "<line x1=\"" + fmt_px(kLeft + 10.0) + "\" y1=\"" + fmt_px(y - 4.0) + "\" x2=\"" +
               fmt_px(kLeft + 34.0) + "\" y2=\"" + fmt_px(y - 4.0) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt_px(kLeft + 40.0) + "\" y=\"" + fmt_px(y) + "\">" +
               xml_escape(plot.series[si].name) + "</text>\n";
    }

    // Title and axis labels.
    svg += "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" +
           xml_escape(plot.title) + "</text>\n";
    svg += "<text x=\"" + fmt_px(0.5 * (kLeft + kRight)) + "\" y=\"" + fmt_px(kBottom + 44.0) +
           "\" text-anchor=\"middle\">" + xml_escape(plot.x_label) + "</text>\n";
    svg += "<text x=\"20\" y=\"" + fmt_px(0.5 * (kTop + kBottom)) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
           fmt_px(0.5 * (kTop + kBottom)) + ")\">" + xml_escape(plot.y_label) + "</text>\n";

    svg += "</svg>\n";
    return svg;
}

void emit_plot(const PlotSpec& plot, const std::string& path) {
    write_text_file(path, render_svg(plot));
}

}  // namespace qeilab::cli
