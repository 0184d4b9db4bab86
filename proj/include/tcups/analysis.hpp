#pragma once

// Measurement pipeline: fringe visibility extraction, renormalisation by the
// laser channel, exponential decay fit, Lorentzian line fit and comparison of
// the time- and frequency-domain linewidths.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tcups/instrument.hpp"
#include "tcups/spectrum.hpp"

namespace tcups::analysis {

enum class VisibilityMethod { FourierSideband, DirectFit };

std::string_view method_name(VisibilityMethod m);
VisibilityMethod parse_method(std::string_view name);

struct VisibilityOptions {
    VisibilityMethod method = VisibilityMethod::FourierSideband;
    std::size_t bootstrap_samples = 64;  // Poisson resamples; counts input only
    std::uint64_t seed = 1;
};

struct VisibilityEstimate {
    double v = 0.0;
    double std_error = 0.0;       // 0 when the input carries no counting noise
    double sideband_delay = 0.0;  // ps, where the sideband peaks
    double noise_floor = 0.0;     // relative to the DC term, same scale as v
};

// Fringe visibility of a pair spectrum with fringes of period 1/expected_delay
// in optical frequency. Fourier method: v = 2 |S(t*)| / |S(0)| with S the
// Fourier transform of the spectrum over optical frequency and t* the sideband
// maximum within +-10% of expected_delay. Direct method: least-squares fit of
// a Gaussian envelope times (1 + v cos(2 pi nu tau + phi)).
//
// Throws AnalysisError when fringes are undersampled (< 4 samples per period),
// the spectrum is empty, or a sideband is expected but does not rise above the
// noise floor. A noise-free spectrum without fringes yields v = 0.
VisibilityEstimate extract_visibility(const Spectrum& s, double expected_delay,
                                      const VisibilityOptions& options = {});
VisibilityEstimate extract_visibility(const instrument::CountsSpectrum& s, double expected_delay,
                                      const VisibilityOptions& options = {});

struct RawVisibility {
    double delay = 0.0;
    double v_stokes = 0.0;
    double stokes_error = 0.0;
    double v_laser = 1.0;
    double laser_error = 0.0;
};

struct VisibilityPoint {
    double delay = 0.0;     // ps
    double v_stokes = 0.0;
    double v_laser = 1.0;
    double v_norm = 0.0;    // v_stokes / v_laser
    double std_error = 0.0; // of v_norm, propagated in quadrature
};

inline constexpr double kMinLaserVisibility = 0.05;

std::vector<VisibilityPoint> renormalize(std::span<const RawVisibility> raw);

// The instrument washes out fringes of period P (nm) by an analytic factor that
// depends on P, and P grows as lambda^2, so laser and Stokes fringes at the same
// delay are degraded differently. Returns F(P_laser) / F(P_stokes); multiplying
// v_stokes / v_laser by it cancels the difference.
double chromatic_correction(const instrument::InstrumentModel& model, double laser_nm, double stokes_nm,
                            double delay);

// Intensity-weighted mean wavelength of a counts spectrum.
double centroid_wavelength(const instrument::CountsSpectrum& s);

struct DecayFitOptions {
    bool fix_amplitude = false;  // v0 == 1
};

struct DecayFitResult {
    double gamma = 0.0;          // ps^-1
    double gamma_std_error = 0.0;
    double v0 = 1.0;
    double v0_std_error = 0.0;
    double residual_rms = 0.0;
    std::size_t tau_points = 0;
    int iterations = 0;
    bool weighted = false;
    bool at_boundary = false;    // no measurable decay; gamma clamped to 0

    std::optional<double> lifetime() const;   // 1/gamma in ps
    std::optional<double> linewidth() const;  // Gamma/pi in cm^-1
};

// Weighted least squares of v_norm = v0 exp(-gamma tau). Points carrying a
// positive std_error are weighted by 1/std_error^2 and the covariance is
// inflated by max(1, reduced chi^2); otherwise the fit is unweighted and the
// covariance scaled by the reduced chi^2.
DecayFitResult fit_decay(std::span<const VisibilityPoint> points, const DecayFitOptions& options = {});

struct LorentzianFit {
    double center = 0.0;     // cm^-1
    double fwhm = 0.0;       // cm^-1
    double amplitude = 0.0;
    double offset = 0.0;
    double center_error = 0.0;
    double fwhm_error = 0.0;
    double amplitude_error = 0.0;
    double offset_error = 0.0;
    int iterations = 0;
};

// Lorentzian plus constant offset, least squares on a wavenumber axis.
LorentzianFit fit_lorentzian(const Spectrum& s);

struct Reconciliation {
    double linewidth_time_domain = 0.0;  // Gamma/pi in cm^-1
    double linewidth_line_fit = 0.0;     // Lorentzian FWHM in cm^-1
    double ratio = 0.0;                  // time-domain / line fit
    bool agree = false;                  // |ratio - 1| <= 0.5
};

Reconciliation reconcile(const DecayFitResult& decay, const LorentzianFit& line);

// Model functions and analytic Jacobians, exposed for derivative checks.
namespace models {
// p = (v0, gamma)
double decay(double tau, const Eigen::Vector2d& p);
Eigen::Vector2d decay_gradient(double tau, const Eigen::Vector2d& p);
// p = (center, fwhm, amplitude, offset)
double lorentzian(double x, const Eigen::Vector4d& p);
Eigen::Vector4d lorentzian_gradient(double x, const Eigen::Vector4d& p);
}  // namespace models

}  // namespace tcups::analysis
