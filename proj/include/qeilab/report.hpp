#pragma once

#include <string>
#include <vector>

namespace qeilab::cli {

// CSV document with a fixed column order.  Doubles are rendered as %.17g so
// equal values always produce identical bytes (the determinism contract).
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns);

    void add_row(const std::vector<double>& values);
    void add_row(const std::vector<std::string>& cells);  // pre-rendered cells
    std::string str() const { return body_; }

    static std::string format(double v);

private:
    std::size_t width_;
    std::string body_;
};

// Writes the full content or throws std::runtime_error with the path named.
void write_text_file(const std::string& path, const std::string& content);

// ---------------------------------------------------------------------------
// Static SVG plots (800 x 600, no interactivity)

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    bool step = false;     // horizontal-then-vertical step plot (counting functions)
    bool markers = false;  // circle markers at the data points
};

struct PlotSpec {
    std::string title;
    std::string x_label;  // carries units where applicable
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<Series> series;
};

// Renders the plot; throws std::invalid_argument for empty/mismatched series
// or nonpositive values on a logarithmic axis.
std::string render_svg(const PlotSpec& plot);

void emit_plot(const PlotSpec& plot, const std::string& path);

}  // namespace qeilab::cli
