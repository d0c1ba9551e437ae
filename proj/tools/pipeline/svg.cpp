#include "svg.hpp"

#include <array>
#include <cstdio>

namespace latentflow::pipeline {

namespace {

constexpr double kMargin = 56.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(std::string_view text) {
    std::string out;
    for (const char c : text) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string_view palette(std::size_t i) {
    static constexpr std::array<std::string_view, 10> colours = {
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
        "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return colours[i % colours.size()];
}

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label, double width, double height)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)),
      width_(width), height_(height) {}

void SvgPlot::set_extent(double x_min, double x_max, double y_min, double y_max) {
    if (!(x_max > x_min)) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (!(y_max > y_min)) {
        y_min -= 0.5;
        y_max += 0.5;
    }
    const double px = 0.03 * (x_max - x_min);
    const double py = 0.03 * (y_max - y_min);
    x0_ = x_min - px;
    x1_ = x_max + px;
    y0_ = y_min - py;
    y1_ = y_max + py;
}

double SvgPlot::sx(double x) const {
    return kMargin + (x - x0_) / (x1_ - x0_) * (width_ - 2 * kMargin);
}

double SvgPlot::sy(double y) const {
    return height_ - kMargin - (y - y0_) / (y1_ - y0_) * (height_ - 2 * kMargin);
}

void SvgPlot::point(double x, double y, std::string_view colour, double radius, double opacity) {
    body_ += "<circle cx=\"" + num(sx(x)) + "\" cy=\"" + num(sy(y)) + "\" r=\"" + num(radius) + "\" fill=\"" +
             std::string(colour) + "\" fill-opacity=\"" + num(opacity) + "\"/>\n";
}

void SvgPlot::polyline(const std::vector<std::pair<double, double>>& points, std::string_view colour,
                       double stroke_width, double opacity) {
    if (points.size() < 2) return;
    body_ += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"" + num(stroke_width) +
             "\" stroke-opacity=\"" + num(opacity) + "\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) body_ += ' ';
        body_ += num(sx(points[i].first)) + ',' + num(sy(points[i].second));
    }
    body_ += "\"/>\n";
}

void SvgPlot::legend(const std::vector<std::pair<std::string, std::string>>& entries) {
    legend_.clear();
    double y = kMargin;
    for (const auto& [label, colour] : entries) {
        const double x = width_ - kMargin + 6;
        legend_ += "<circle cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"4\" fill=\"" + colour + "\"/>\n";
        legend_ += "<text x=\"" + num(x + 8) + "\" y=\"" + num(y + 4) + "\" font-size=\"10\">" + escape(label) +
                   "</text>\n";
        y += 14;
    }
}

std::string SvgPlot::str() const {
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_ + 80) + "\" height=\"" + num(height_) +
           "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(width_ / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + escape(title_) +
           "</text>\n";
    const double l = kMargin, r = width_ - kMargin, t = kMargin, b = height_ - kMargin;
    out += "<rect x=\"" + num(l) + "\" y=\"" + num(t) + "\" width=\"" + num(r - l) + "\" height=\"" + num(b - t) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = x0_ + (x1_ - x0_) * i / 4.0;
        const double fy = y0_ + (y1_ - y0_) * i / 4.0;
        out += "<text x=\"" + num(sx(fx)) + "\" y=\"" + num(b + 14) + "\" text-anchor=\"middle\" font-size=\"9\">" +
               num(fx) + "</text>\n";
        out += "<text x=\"" + num(l - 4) + "\" y=\"" + num(sy(fy) + 3) + "\" text-anchor=\"end\" font-size=\"9\">" +
               num(fy) + "</text>\n";
    }
    out += "<text x=\"" + num(width_ / 2) + "\" y=\"" + num(height_ - 14) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + escape(x_label_) + "</text>\n";
    out += "<text x=\"14\" y=\"" + num(height_ / 2) + "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 14 " +
           num(height_ / 2) + ")\">" + escape(y_label_) + "</text>\n";
    out += body_;
    out += legend_;
    out += "</svg>\n";
    return out;
}

}  // namespace latentflow::pipeline
