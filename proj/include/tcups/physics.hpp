#pragma once

// Physical constants, spectroscopic unit conversions and the closed-form
// scalar relations used throughout the simulation and analysis.

#include <string_view>

namespace tcups::physics {

// CODATA 2018 exact SI values.
struct PhysConstants {
    static constexpr double speed_of_light = 299792458.0;   // m/s
    static constexpr double boltzmann = 1.380649e-23;       // J/K
    static constexpr double planck = 6.62607015e-34;        // J s
};

inline constexpr double kPi = 3.14159265358979323846;

// Derived helpers in the lab units used by this code base.
inline constexpr double kC_nm_per_ps = PhysConstants::speed_of_light * 1e-3;  // 299792.458
inline constexpr double kC_cm_per_ps = PhysConstants::speed_of_light * 1e-10; // 0.0299792458
// Second radiation constant h c / k_B in cm K.
inline constexpr double kHcOverK_cm_K =
    PhysConstants::planck * PhysConstants::speed_of_light * 100.0 / PhysConstants::boltzmann;

enum class Unit { Nanometer, Wavenumber, Terahertz, Picosecond };

std::string_view unit_name(Unit u);

// A spectral position. nm and cm^-1 are vacuum wavelength / wavenumber,
// THz is optical frequency and ps is the optical period.
struct SpectralQuantity {
    double value;
    Unit unit;
};

SpectralQuantity convert(SpectralQuantity q, Unit target);

double nm_to_wavenumber(double nm);
double wavenumber_to_nm(double wavenumber);
double nm_to_thz(double nm);
double thz_to_nm(double thz);

struct MaterialParams {
    double raman_shift = 1332.0;          // cm^-1
    double gamma = 1.0 / 6.8;             // ps^-1, amplitude dephasing rate
    double raman_gain = 7.4e-3;           // cm/MW
    double vibrational_energy = 1332.0;   // cm^-1

    void validate() const;
};

// Wavelength of the Stokes line for a pump at `pump_nm` and a Raman shift in cm^-1.
double stokes_wavelength(double pump_nm, double shift_cm);

// Spectral fringe spacing lambda^2 / (c tau) in nm for two pulses `delay_ps` apart.
double fringe_spacing(double center_nm, double delay_ps);

// Bose-Einstein occupation of a mode of energy `e_vib_cm` at temperature `temperature_k`.
double thermal_population(double e_vib_cm, double temperature_k);

// FWHM linewidth in cm^-1 of a mode whose amplitude decays at `gamma` (ps^-1),
// Delta nu = Gamma / pi, and its inverse.
double linewidth_from_gamma(double gamma_ps);
double gamma_from_linewidth(double fwhm_cm);

// Q = nu / Gamma with Gamma expressed in cm^-1 (= pi * FWHM).
double q_factor(double nu_cm, double gamma_ps);

inline constexpr double kDefaultYieldCalibration = 0.0035;  // photons per pJ

// Spontaneous Stokes photons per pulse; linear in pump energy.
double stokes_yield(double pulse_energy_pj, double photons_per_pj = kDefaultYieldCalibration);

// Order-of-magnitude estimate of the spontaneous Stokes yield into the collinear
// mode, taken as the single-pass gain exponent g * I_peak * L seeded by one
// vacuum photon. The focusing geometry is an assumption; the simulation uses the
// calibrated stokes_yield() instead.
struct GainEstimateInputs {
    double raman_gain_cm_per_mw = 7.4e-3;
    double pulse_energy_pj = 380.0;
    double duration_fs = 80.0;
    double spot_radius_um = 10.0;
    double interaction_length_mm = 1.0;
};
double stokes_yield_from_gain(const GainEstimateInputs& in);

}  // namespace tcups::physics
