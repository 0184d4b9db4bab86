#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tcups {

// Frequency axes are optical frequency in THz, wavelength axes vacuum wavelength
// in nm, wavenumber axes cm^-1 (absolute or Raman shift).
enum class Axis { Frequency, Wavelength, Wavenumber };

// A uniform sampling axis.
struct Grid {
    Axis axis = Axis::Frequency;
    double start = 0.0;
    double step = 1.0;
    std::size_t count = 0;

    static Grid spanning(Axis axis, double lo, double hi, std::size_t count);

    double at(std::size_t i) const { return start + step * static_cast<double>(i); }
    double back() const { return at(count - 1); }
    // Optical frequency (THz) of sample i regardless of axis kind.
    double frequency_at(std::size_t i) const;
    std::vector<double> values() const;
};

// Sampled spectral intensity on a uniform, strictly increasing grid.
class Spectrum {
public:
    Spectrum(Axis axis, std::vector<double> grid, std::vector<double> intensity,
             std::size_t shots = 1);
    Spectrum(const Grid& grid, std::vector<double> intensity, std::size_t shots = 1);

    Axis axis() const { return axis_; }
    std::span<const double> grid() const { return grid_; }
    std::span<const double> intensity() const { return intensity_; }
    std::size_t size() const { return grid_.size(); }
    std::size_t shots() const { return shots_; }
    double pitch() const { return grid_[1] - grid_[0]; }

    // Trapezoidal integral of the intensity over the grid.
    double integral() const;
    double peak() const;
    Spectrum scaled(double factor) const;

private:
    Axis axis_;
    std::vector<double> grid_;
    std::vector<double> intensity_;
    std::size_t shots_;
};

// Optical frequency (THz) of every sample.
std::vector<double> optical_frequencies(const Spectrum& s);

// Resamples a frequency-axis spectrum onto a uniform wavelength grid with the
// same number of points (linear interpolation in frequency). With `jacobian`
// the intensity is converted from per-THz to per-nm density (factor c / lambda^2).
Spectrum to_wavelength_axis(const Spectrum& s, bool jacobian = false);

}  // namespace tcups
