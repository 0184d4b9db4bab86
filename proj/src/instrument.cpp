#include "tcups/instrument.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "tcups/errors.hpp"
#include "tcups/physics.hpp"
#include "tcups/rng.hpp"

namespace tcups::instrument {

namespace {

constexpr double kFwhmToSigma = 0.42466090014400953;  // 1 / (2 sqrt(2 ln 2))
constexpr double kKernelHalfWidthSigmas = 7.0;

}  // namespace

NoiseModel parse_noise_model(std::string_view name) {
    if (name == "off") return NoiseModel::Off;
    if (name == "poisson") return NoiseModel::Poisson;
    throw DomainError("unknown noise model '" + std::string(name) + "'");
}

std::string_view noise_model_name(NoiseModel m) {
    return m == NoiseModel::Off ? "off" : "poisson";
}

InstrumentModel InstrumentModel::for_grating(double lines_per_mm) {
    InstrumentModel m;
    m.grating = lines_per_mm;
    if (lines_per_mm == 150.0) {
        m.resolution_fwhm = 0.7;
        m.pixel_width = 0.34;
    } else if (lines_per_mm == 1800.0) {
        m.resolution_fwhm = 0.06;
        m.pixel_width = 0.025;
    } else {
        throw DomainError("no default response for a " + std::to_string(lines_per_mm) +
                          " lines/mm grating; give resolution and pixel width explicitly");
    }
    return m;
}

void InstrumentModel::validate() const {
    if (!(grating > 0.0)) throw DomainError("grating ruling must be positive");
    if (!(resolution_fwhm >= 0.0) || !std::isfinite(resolution_fwhm)) {
        throw DomainError("resolution FWHM must be >= 0");
    }
    if (!(pixel_width > 0.0) || !std::isfinite(pixel_width)) {
        throw DomainError("pixel width must be positive");
    }
    if (!(efficiency > 0.0 && efficiency <= 1.0)) {
        throw DomainError("detection efficiency must lie in (0, 1]");
    }
}

void CountsSpectrum::validate() const {
    if (bins.size() < 2) throw DomainError("counts spectrum needs at least two pixels");
    if (bins.size() != counts.size()) throw DomainError("bin and count lengths differ");
    const double pitch = (bins.back() - bins.front()) / static_cast<double>(bins.size() - 1);
    if (!(pitch > 0.0)) throw DomainError("pixel centres must be strictly increasing");
    for (std::size_t i = 1; i < bins.size(); ++i) {
        const double d = bins[i] - bins[i - 1];
        if (!(d > 0.0) || std::abs(d - pitch) > 1e-9 * std::max(1.0, std::abs(bins[i]))) {
            throw DomainError("pixel centres must be uniformly spaced");
        }
    }
    for (double c : counts) {
        if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("counts must be non-negative");
    }
    if (!(exposure >= 1.0)) throw DomainError("exposure must be at least one pulse");
}

double CountsSpectrum::total() const {
    double acc = 0.0;
    for (double c : counts) acc += c;
    return acc;
}

Spectrum convolve_response(const Spectrum& s, const InstrumentModel& model) {
    model.validate();
    if (model.resolution_fwhm == 0.0) return s;
    const double h = s.pitch();
    const double sigma = model.resolution_fwhm * kFwhmToSigma;
    const auto half = static_cast<std::ptrdiff_t>(std::ceil(kKernelHalfWidthSigmas * sigma / h));
    const auto n = static_cast<std::ptrdiff_t>(s.size());
    if (2 * half + 1 > n) {
        throw DomainError("instrument response kernel is wider than the spectrum grid");
    }
    std::vector<double> kernel(static_cast<std::size_t>(2 * half + 1));
    for (std::ptrdiff_t j = -half; j <= half; ++j) {
        const double x = static_cast<double>(j) * h / sigma;
        kernel[static_cast<std::size_t>(j + half)] = std::exp(-0.5 * x * x);
    }
    double ksum = 0.0;
    for (double k : kernel) ksum += k;
    for (double& k : kernel) k /= ksum;

    const auto in = s.intensity();
    std::vector<double> out(s.size(), 0.0);
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0, wsum = 0.0;
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
            const double w = kernel[static_cast<std::size_t>(j - i + half)];
            acc += w * in[static_cast<std::size_t>(j)];
            wsum += w;
        }
        out[static_cast<std::size_t>(i)] = acc / wsum;
    }
    return Spectrum(s.axis(), std::vector<double>(s.grid().begin(), s.grid().end()),
                    std::move(out), s.shots());
}

CountsSpectrum pixel_bin(const Spectrum& s, const InstrumentModel& model, double exposure,
                         double fringe_period) {
    model.validate();
    const double w = model.pixel_width;
    const double h = s.pitch();
    if (w < 2.0 * h * (1.0 - 1e-9)) {
        throw DomainError("pixel width must be at least twice the input grid pitch");
    }
    if (fringe_period > 0.0 && w > 0.5 * fringe_period) {
        throw DomainError("pixel width exceeds half the fringe period; fringes are unresolvable");
    }
    if (!(exposure >= 1.0)) throw DomainError("exposure must be at least one pulse");

    const auto x = s.grid();
    const auto y = s.intensity();
    const std::size_t n = s.size();
    // Cumulative trapezoid integral at the grid nodes.
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) cum[i] = cum[i - 1] + 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    // Exact integral of the linear interpolant from x[0] to t.
    auto integral_to = [&](double t) {
        if (t <= x[0]) return 0.0;
        if (t >= x[n - 1]) return cum[n - 1];
        std::size_t i = static_cast<std::size_t>((t - x[0]) / h);
        i = std::min(i, n - 2);
        while (i + 1 < n - 1 && x[i + 1] <= t) ++i;
        while (i > 0 && x[i] > t) --i;
        const double u = t - x[i];
        const double slope = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        return cum[i] + y[i] * u + 0.5 * slope * u * u;
    };

    const double span = x[n - 1] - x[0];
    const auto pixels = static_cast<std::size_t>(std::floor(span / w * (1.0 + 1e-12)));
    if (pixels < 2) throw DomainError("spectrum spans fewer than two pixels");
    CountsSpectrum out;
    out.exposure = exposure;
    out.bins.resize(pixels);
    out.counts.resize(pixels);
    double left = integral_to(x[0]);
    for (std::size_t p = 0; p < pixels; ++p) {
        const double edge = x[0] + w * static_cast<double>(p + 1);
        const double right = integral_to(edge);
        out.bins[p] = x[0] + w * (static_cast<double>(p) + 0.5);
        out.counts[p] = std::max(0.0, right - left);
        left = right;
    }
    return out;
}

CountsSpectrum apply_counting(const CountsSpectrum& s, const InstrumentModel& model,
                              std::uint64_t stream) {
    model.validate();
    s.validate();
    CountsSpectrum out = s;
    const double scale = model.efficiency * s.exposure;
    if (model.noise == NoiseModel::Off) {
        for (double& c : out.counts) c *= scale;
        out.integer_counts = false;
        return out;
    }
    Engine rng = substream(model.seed, Stream::PoissonCounts, stream);
    for (double& c : out.counts) {
        const double mean = c * scale;
        if (mean <= 0.0) {
            c = 0.0;
            continue;
        }
        std::poisson_distribution<long long> draw(mean);
        c = static_cast<double>(draw(rng));
    }
    out.integer_counts = true;
    return out;
}

double gaussian_visibility_factor(double fwhm, double period) {
    if (!(period > 0.0)) throw DomainError("fringe period must be positive");
    if (!(fwhm >= 0.0)) throw DomainError("FWHM must be >= 0");
    const double r = fwhm / period;
    return std::exp(-(physics::kPi * physics::kPi / (4.0 * std::log(2.0))) * r * r);
}

double pixel_visibility_factor(double width, double period) {
    if (!(period > 0.0)) throw DomainError("fringe period must be positive");
    if (!(width >= 0.0)) throw DomainError("pixel width must be >= 0");
    const double x = physics::kPi * width / period;
    return x == 0.0 ? 1.0 : std::abs(std::sin(x) / x);
}

}  // namespace tcups::instrument
