#include "tcups/stats.hpp"

#include <cmath>

#include "tcups/errors.hpp"

namespace tcups::stats {

double mean(std::span<const double> v) {
    if (v.empty()) throw DomainError("mean of empty sample");
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
    if (v.size() < 2) throw DomainError("stddev needs at least two samples");
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw DomainError("line fit needs matching samples, at least two");
    }
    const double n = static_cast<double>(x.size());
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("line fit needs distinct abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ssr = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        ssr += r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    if (x.size() > 2) {
        const double s2 = ssr / (n - 2.0);
        f.slope_error = std::sqrt(s2 / sxx);
        f.intercept_error = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    }
    return f;
}

double r_squared(std::span<const double> data, std::span<const double> model) {
    if (data.size() != model.size() || data.empty()) throw DomainError("size mismatch");
    const double m = mean(data);
    double ssr = 0.0, sst = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        ssr += (data[i] - model[i]) * (data[i] - model[i]);
        sst += (data[i] - m) * (data[i] - m);
    }
    return sst > 0.0 ? 1.0 - ssr / sst : (ssr == 0.0 ? 1.0 : 0.0);
}

}  // namespace tcups::stats
