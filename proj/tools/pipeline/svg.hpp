#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace latentflow::pipeline {

/// Categorical colour for index i (cycles).
std::string_view palette(std::size_t i);

/// Scatter/line chart in data coordinates with a fixed plot frame.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label, double width = 640, double height = 480);

    /// Data extent; call before adding marks. Degenerate ranges are widened.
    void set_extent(double x_min, double x_max, double y_min, double y_max);

    void point(double x, double y, std::string_view colour, double radius = 2.0, double opacity = 0.7);
    void polyline(const std::vector<std::pair<double, double>>& points, std::string_view colour,
                  double stroke_width = 1.0, double opacity = 0.6);
    void legend(const std::vector<std::pair<std::string, std::string>>& entries);  // (label, colour)

    std::string str() const;

private:
    double sx(double x) const;
    double sy(double y) const;

    std::string title_, x_label_, y_label_;
    double width_, height_;
    double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
    std::string body_;
    std::string legend_;
};

}  // namespace latentflow::pipeline
