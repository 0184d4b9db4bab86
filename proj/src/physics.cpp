#include "tcups/physics.hpp"

#include <cmath>
#include <string>

#include "tcups/errors.hpp"

namespace tcups::physics {

namespace {

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

}  // namespace

std::string_view unit_name(Unit u) {
    switch (u) {
        case Unit::Nanometer: return "nm";
        case Unit::Wavenumber: return "cm^-1";
        case Unit::Terahertz: return "THz";
        case Unit::Picosecond: return "ps";
    }
    return "?";
}

double nm_to_wavenumber(double nm) {
    require_positive(nm, "wavelength");
    return 1e7 / nm;
}

double wavenumber_to_nm(double wavenumber) {
    require_positive(wavenumber, "wavenumber");
    return 1e7 / wavenumber;
}

double nm_to_thz(double nm) {
    require_positive(nm, "wavelength");
    return kC_nm_per_ps / nm;
}

double thz_to_nm(double thz) {
    require_positive(thz, "frequency");
    return kC_nm_per_ps / thz;
}

SpectralQuantity convert(SpectralQuantity q, Unit target) {
    require_positive(q.value, "spectral quantity");
    if (q.unit == target) return q;
    // Route everything through frequency in THz.
    double thz = 0.0;
    switch (q.unit) {
        case Unit::Nanometer: thz = nm_to_thz(q.value); break;
        case Unit::Wavenumber: thz = q.value * kC_cm_per_ps; break;
        case Unit::Terahertz: thz = q.value; break;
        case Unit::Picosecond: thz = 1.0 / q.value; break;
    }
    switch (target) {
        case Unit::Nanometer: return {thz_to_nm(thz), target};
        case Unit::Wavenumber: return {thz / kC_cm_per_ps, target};
        case Unit::Terahertz: return {thz, target};
        case Unit::Picosecond: return {1.0 / thz, target};
    }
    return q;
}

void MaterialParams::validate() const {
    require_positive(raman_shift, "raman_shift");
    require_positive(gamma, "gamma");
    require_positive(raman_gain, "raman_gain");
    require_positive(vibrational_energy, "vibrational_energy");
}

double stokes_wavelength(double pump_nm, double shift_cm) {
    const double pump_cm = nm_to_wavenumber(pump_nm);
    if (shift_cm >= pump_cm) {
        throw DomainError("Raman shift exceeds the pump wavenumber");
    }
    if (shift_cm < 0.0) throw DomainError("Raman shift must be non-negative");
    return 1e7 / (pump_cm - shift_cm);
}

double fringe_spacing(double center_nm, double delay_ps) {
    require_positive(center_nm, "center wavelength");
    require_positive(delay_ps, "delay");
    return center_nm * center_nm / (kC_nm_per_ps * delay_ps);
}

double thermal_population(double e_vib_cm, double temperature_k) {
    require_positive(temperature_k, "temperature");
    require_positive(e_vib_cm, "vibrational energy");
    const double x = kHcOverK_cm_K * e_vib_cm / temperature_k;
    // expm1 keeps precision at high T; for large x the result underflows to 0.
    return 1.0 / std::expm1(x);
}

double linewidth_from_gamma(double gamma_ps) {
    require_positive(gamma_ps, "gamma");
    return gamma_ps / (kPi * kC_cm_per_ps);
}

double gamma_from_linewidth(double fwhm_cm) {
    require_positive(fwhm_cm, "linewidth");
    return fwhm_cm * kPi * kC_cm_per_ps;
}

double q_factor(double nu_cm, double gamma_ps) {
    require_positive(nu_cm, "nu");
    require_positive(gamma_ps, "gamma");
    return nu_cm / (kPi * linewidth_from_gamma(gamma_ps));
}

double stokes_yield(double pulse_energy_pj, double photons_per_pj) {
    if (!(pulse_energy_pj >= 0.0)) throw DomainError("pulse energy must be non-negative");
    require_positive(photons_per_pj, "yield calibration");
    return photons_per_pj * pulse_energy_pj;
}

double stokes_yield_from_gain(const GainEstimateInputs& in) {
    require_positive(in.raman_gain_cm_per_mw, "raman gain");
    require_positive(in.duration_fs, "duration");
    require_positive(in.spot_radius_um, "spot radius");
    require_positive(in.interaction_length_mm, "interaction length");
    if (!(in.pulse_energy_pj >= 0.0)) throw DomainError("pulse energy must be non-negative");
    const double area_cm2 = kPi * std::pow(in.spot_radius_um * 1e-4, 2);
    const double peak_mw = in.pulse_energy_pj * 1e-12 / (in.duration_fs * 1e-15) * 1e-6;
    const double intensity_mw_cm2 = peak_mw / area_cm2;
    return in.raman_gain_cm_per_mw * intensity_mw_cm2 * in.interaction_length_mm * 0.1;
}

}  // namespace tcups::physics
