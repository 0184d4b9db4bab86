#include "tcups/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tcups/errors.hpp"
#include "tcups/physics.hpp"

namespace tcups {

Grid Grid::spanning(Axis axis, double lo, double hi, std::size_t count) {
    if (count < 2) throw DomainError("grid needs at least two samples");
    if (!(hi > lo)) throw DomainError("grid upper bound must exceed lower bound");
    return Grid{axis, lo, (hi - lo) / static_cast<double>(count - 1), count};
}

double Grid::frequency_at(std::size_t i) const {
    const double x = at(i);
    switch (axis) {
        case Axis::Frequency: return x;
        case Axis::Wavelength: return physics::kC_nm_per_ps / x;
        case Axis::Wavenumber: return x * physics::kC_cm_per_ps;
    }
    return x;
}

std::vector<double> Grid::values() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = at(i);
    return v;
}

Spectrum::Spectrum(Axis axis, std::vector<double> grid, std::vector<double> intensity,
                   std::size_t shots)
    : axis_(axis), grid_(std::move(grid)), intensity_(std::move(intensity)), shots_(shots) {
    if (grid_.size() < 2) throw DomainError("spectrum needs at least two samples");
    if (grid_.size() != intensity_.size()) {
        throw DomainError("spectrum grid and intensity lengths differ");
    }
    const double step = (grid_.back() - grid_.front()) / static_cast<double>(grid_.size() - 1);
    if (!(step > 0.0)) throw DomainError("spectrum grid must be strictly increasing");
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        const double d = grid_[i] - grid_[i - 1];
        if (!(d > 0.0) || std::abs(d - step) > 1e-9 * std::max(std::abs(grid_[i]), 1.0) + 1e-9 * step) {
            throw DomainError("spectrum grid must be uniform and strictly increasing");
        }
    }
    for (double v : intensity_) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw DomainError("spectrum intensity must be finite and non-negative");
        }
    }
    if (shots_ == 0) throw DomainError("shot count must be at least 1");
}

Spectrum::Spectrum(const Grid& grid, std::vector<double> intensity, std::size_t shots)
    : Spectrum(grid.axis, grid.values(), std::move(intensity), shots) {}

double Spectrum::integral() const {
    double acc = 0.0;
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        acc += 0.5 * (intensity_[i] + intensity_[i - 1]) * (grid_[i] - grid_[i - 1]);
    }
    return acc;
}

double Spectrum::peak() const { return *std::max_element(intensity_.begin(), intensity_.end()); }

Spectrum Spectrum::scaled(double factor) const {
    if (!(factor >= 0.0)) throw DomainError("scale factor must be non-negative");
    std::vector<double> out(intensity_);
    for (double& v : out) v *= factor;
    return Spectrum(axis_, grid_, std::move(out), shots_);
}

std::vector<double> optical_frequencies(const Spectrum& s) {
    std::vector<double> nu(s.grid().begin(), s.grid().end());
    if (s.axis() == Axis::Wavelength) {
        for (double& x : nu) x = physics::kC_nm_per_ps / x;
    } else if (s.axis() == Axis::Wavenumber) {
        for (double& x : nu) x *= physics::kC_cm_per_ps;
    }
    return nu;
}

Spectrum to_wavelength_axis(const Spectrum& s, bool jacobian) {
    if (s.axis() == Axis::Wavelength) return s;
    if (s.axis() != Axis::Frequency) throw DomainError("only frequency spectra convert to wavelength");
    const auto nu = s.grid();
    const auto in = s.intensity();
    if (!(nu.front() > 0.0)) throw DomainError("frequency grid must be positive to convert");
    const Grid out_grid = Grid::spanning(Axis::Wavelength, physics::kC_nm_per_ps / nu.back(),
                                         physics::kC_nm_per_ps / nu.front(), s.size());
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double lambda = out_grid.at(i);
        const double f = std::clamp(physics::kC_nm_per_ps / lambda, nu.front(), nu.back());
        const auto it = std::upper_bound(nu.begin(), nu.end(), f);
        std::size_t hi = static_cast<std::size_t>(std::distance(nu.begin(), it));
        hi = std::clamp<std::size_t>(hi, 1, nu.size() - 1);
        const std::size_t lo = hi - 1;
        const double w = (f - nu[lo]) / (nu[hi] - nu[lo]);
        double v = (1.0 - w) * in[lo] + w * in[hi];
        if (jacobian) v *= physics::kC_nm_per_ps / (lambda * lambda);
        out[i] = std::max(v, 0.0);
    }
    return Spectrum(out_grid, std::move(out), s.shots());
}

}  // namespace tcups
