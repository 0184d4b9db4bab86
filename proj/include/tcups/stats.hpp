#pragma once

#include <cstddef>
#include <span>

namespace tcups::stats {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_error = 0.0;
    double intercept_error = 0.0;
    double r_squared = 0.0;
};

// Ordinary least-squares straight line y = intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);
// Sample standard deviation (n - 1 denominator).
double stddev(std::span<const double> v);

// Coefficient of determination of `model` against `data`.
double r_squared(std::span<const double> data, std::span<const double> model);

}  // namespace tcups::stats
