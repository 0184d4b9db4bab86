#pragma once

// Spectrometer + camera model: Gaussian instrument response, finite pixel
// integration, detection efficiency and photon-counting noise.

#include <cstdint>
#include <string_view>
#include <vector>

#include "tcups/spectrum.hpp"

namespace tcups::instrument {

enum class NoiseModel { Off, Poisson };

NoiseModel parse_noise_model(std::string_view name);
std::string_view noise_model_name(NoiseModel m);

struct InstrumentModel {
    double grating = 1800.0;          // lines/mm; informational for custom gratings
    double resolution_fwhm = 0.06;    // nm
    double pixel_width = 0.025;       // nm
    double efficiency = 0.5;
    NoiseModel noise = NoiseModel::Poisson;
    std::uint64_t seed = 1;

    // Configuration defaults for the two gratings of a 30 cm spectrograph with
    // 16 um pixels. Not measured values. Throws for other rulings.
    static InstrumentModel for_grating(double lines_per_mm);

    void validate() const;
};

// Pixel-integrated signal on a uniform pixel-centred axis.
struct CountsSpectrum {
    std::vector<double> bins;     // pixel centres, nm
    std::vector<double> counts;
    double exposure = 1.0;        // pulses integrated
    bool integer_counts = false;  // true once Poisson counting has been applied

    void validate() const;
    double pixel_width() const { return bins[1] - bins[0]; }
    double total() const;
    std::size_t size() const { return bins.size(); }
};

// Convolution with a unit-area Gaussian of the model's FWHM (grid units).
// The kernel is renormalised where it overhangs the grid ends.
Spectrum convolve_response(const Spectrum& s, const InstrumentModel& model);

// Integrates the piecewise-linear spectrum over consecutive pixels of width
// model.pixel_width starting at the first grid sample. Requires the pixel to
// span at least two grid pitches. When `fringe_period` > 0 (grid units), throws
// if the pixel exceeds half a fringe period.
CountsSpectrum pixel_bin(const Spectrum& s, const InstrumentModel& model, double exposure = 1.0,
                         double fringe_period = 0.0);

// Scales by efficiency * exposure; with Poisson noise each pixel is replaced by
// a Poisson draw of that mean. `stream` separates independent spectra sharing
// the model seed.
CountsSpectrum apply_counting(const CountsSpectrum& s, const InstrumentModel& model,
                              std::uint64_t stream = 0);

// Analytic fringe-contrast factors for fringes of period `period`.
double gaussian_visibility_factor(double fwhm, double period);
double pixel_visibility_factor(double width, double period);

}  // namespace tcups::instrument
