#pragma once

// Minimal SVG line charts. Data provenance is embedded as XML comments.

#include <string>
#include <vector>

namespace tcups::app::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> y_error;  // optional, same length as y
    bool markers = false;         // points (with error bars) instead of a polyline
    std::string color = "#1f77b4";
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<std::string> provenance;
    double width = 720.0;
    double height = 480.0;
};

std::string render(const Chart& chart, const std::vector<Series>& series);

}  // namespace tcups::app::svg
