#include "tcups/app/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace tcups::app::svg {

namespace {

std::string esc(const std::string& s) {
    std::string out;
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

// "--" is not allowed inside XML comments.
std::string comment_safe(std::string s) {
    for (std::size_t p; (p = s.find("--")) != std::string::npos;) s.replace(p, 2, "- -");
    return s;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

std::string render(const Chart& chart, const std::vector<Series>& series) {
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            const double e = i < s.y_error.size() ? s.y_error[i] : 0.0;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i] - e);
            y1 = std::max(y1, s.y[i] + e);
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    const double left = 80, right = 20, top = 40, bottom = 60;
    const double pw = chart.width - left - right, ph = chart.height - top - bottom;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

    std::string o;
    o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    for (const auto& line : chart.provenance) o += "<!-- " + comment_safe(line) + " -->\n";
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(chart.width) + "\" height=\"" +
         num(chart.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o += "<text x=\"" + num(chart.width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         esc(chart.title) + "</text>\n";
    o += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        const double xv = x0 + (x1 - x0) * k / 5.0, yv = y0 + (y1 - y0) * k / 5.0;
        o += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(top + ph + 18) + "\" text-anchor=\"middle\">" +
             tick(xv) + "</text>\n";
        o += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" + tick(yv) +
             "</text>\n";
    }
    o += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(chart.height - 15) + "\" text-anchor=\"middle\">" +
         esc(chart.x_label) + "</text>\n";
    o += "<text transform=\"translate(18," + num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         esc(chart.y_label) + "</text>\n";

    double legend_y = top + 16;
    for (const auto& s : series) {
        o += "<g stroke=\"" + s.color + "\" fill=\"" + (s.markers ? s.color : std::string("none")) + "\">\n";
        if (s.markers) {
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!std::isfinite(s.y[i])) continue;
                if (i < s.y_error.size() && s.y_error[i] > 0) {
                    o += "<line x1=\"" + num(px(s.x[i])) + "\" y1=\"" + num(py(s.y[i] - s.y_error[i])) +
                         "\" x2=\"" + num(px(s.x[i])) + "\" y2=\"" + num(py(s.y[i] + s.y_error[i])) + "\"/>\n";
                }
                o += "<circle cx=\"" + num(px(s.x[i])) + "\" cy=\"" + num(py(s.y[i])) + "\" r=\"3\"/>\n";
            }
        } else {
            o += "<polyline stroke-width=\"1.2\" points=\"";
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!std::isfinite(s.y[i])) continue;
                o += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
            }
            o += "\"/>\n";
        }
        o += "</g>\n";
        if (!s.label.empty()) {
            o += "<text x=\"" + num(left + pw - 8) + "\" y=\"" + num(legend_y) + "\" text-anchor=\"end\" fill=\"" +
                 s.color + "\">" + esc(s.label) + "</text>\n";
            legend_y += 16;
        }
    }
    o += "</svg>\n";
    return o;
}

}  // namespace tcups::app::svg
