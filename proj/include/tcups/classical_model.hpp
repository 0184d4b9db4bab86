#pragma once

// Fluctuating-phase model of the Stokes pulse pair. Each shot emits
// E1(t) + exp(i theta) E1(t - tau); the relative phase theta is redrawn every
// shot and the shot-averaged spectrum carries fringes of visibility
// |<exp(i theta)>| = exp(-Gamma |tau|).

#include <cstddef>
#include <cstdint>
#include "tcups/rng.hpp"
#include <string_view>

#include "tcups/physics.hpp"
#include "tcups/spectrum.hpp"

namespace tcups::classical {

struct PulsePair {
    double center_wavelength = 788.0;  // nm
    double duration_fwhm = 80.0;       // fs, transform-limited intensity FWHM
    double delay = 0.0;                // ps
    double relative_phase = 0.0;       // rad

    void validate() const;
    double center_frequency() const;   // THz
    // Spectral intensity FWHM (THz) of a transform-limited Gaussian pulse.
    double bandwidth() const;
};

inline constexpr double kGaussianTimeBandwidth = 0.441271200305303;  // 2 ln2 / pi

enum class PhaseModel { CauchyFrequency, DirectExponential };

PhaseModel parse_phase_model(std::string_view name);
std::string_view phase_model_name(PhaseModel m);

struct ShotEnsemble {
    std::size_t shots = 10000;
    std::uint64_t seed = 1;
    PhaseModel phase_model = PhaseModel::CauchyFrequency;
    // Worker threads for the shot loop; 0 picks hardware concurrency. Never
    // changes the result.
    unsigned workers = 0;

    void validate() const;
};

struct ExcitationConfig {
    double pump_wavelength = 788.0;  // nm
    double duration_fwhm = 80.0;     // fs
    double pulse_energy = 380.0;     // pJ
    double delay = 0.39;             // ps
};

// Unit-peak Gaussian |E1|^2 of a single pulse (delay and phase ignored).
// Throws DomainError if the envelope at either grid edge exceeds 1e-3 of peak.
Spectrum single_pulse_spectrum(const PulsePair& pulse, const Grid& grid);

// Draws the relative phase for one shot. For DirectExponential no sampling
// takes place and 0 is returned; the visibility factor is applied analytically.
double sample_phase(PhaseModel model, double gamma, double delay, Engine& rng);

// 2 |E1|^2 (1 + cos(omega tau + theta)) for one shot with fixed theta.
Spectrum pair_spectrum(const PulsePair& pulse, const Grid& grid);

// Stokes pulse pair averaged over the ensemble. The Stokes centre wavelength is
// derived from the pump and the material Raman shift.
Spectrum averaged_spectrum(const ExcitationConfig& config,
                           const physics::MaterialParams& material,
                           const ShotEnsemble& ensemble, const Grid& grid);

// Mean of exp(i theta) over the ensemble, returned as (mean cos, mean sin).
struct PhasorMean {
    double cos_mean = 1.0;
    double sin_mean = 0.0;
};
PhasorMean ensemble_phasor(double gamma, double delay, const ShotEnsemble& ensemble);

// Pair spectrum with a given complex fringe factor: 2|E1|^2 (1 + Re[c e^{i omega tau}]).
Spectrum fringe_spectrum(const PulsePair& pulse, const Grid& grid, PhasorMean fringe,
                         std::size_t shots = 1);

}  // namespace tcups::classical
