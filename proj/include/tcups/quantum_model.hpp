#pragma once

// Photon-phonon Langevin model of two-pulse spontaneous Raman scattering.
//
//   dA/dt = -i g B^+            (pump on)
//   dB/dt = -i g A^+ - Gamma B + F^+
//
// perturbative_ops() evaluates the first-order solution in closed form.
// integrate_langevin() simulates the same protocol with a c-number stochastic
// analog (symmetric-ordering/Wigner representation, exact for this linear
// system) and serves as an independent check of the closed form.
//
// Amplitude convention: c-number amplitudes are scaled so that a vacuum mode has
// <|a|^2> = 1 (twice the Wigner second moment). Reported occupations and
// correlations are converted back to photon/phonon numbers:
//   n = (<|a|^2> - 1) / 2,   <A1^+ A2> = <a1* a2> / 2.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tcups::quantum {

struct LangevinParams {
    double coupling = 0.125;            // g, ps^-1 while the pump is on
    double pump_duration = 0.08;        // ps
    double gamma = 1.0 / 6.8;           // ps^-1
    double dt = 0.004;                  // ps, upper bound on the integrator step
    std::size_t trajectories = 10000;
    std::uint64_t seed = 20080101;
    double thermal_population = 0.0;    // N_B(0)
    bool langevin_noise = true;         // F; switching it off breaks normalization
    unsigned workers = 0;

    // Throws DomainError on invalid values or when dt > min(pump, 1/Gamma)/20.
    void validate() const;
    // Human-readable notes when g*tau_pump or Gamma*tau_pump exceed 0.1.
    std::vector<std::string> regime_warnings() const;
    // Scaled second moment of the phonon mode in equilibrium, 2 N_B + 1.
    double phonon_norm() const { return 2.0 * thermal_population + 1.0; }
};

struct ModeState {
    std::complex<double> a;  // Stokes mode
    std::complex<double> b;  // phonon mode
    double t = 0.0;          // ps
};

struct CorrelationResult {
    double delay = 0.0;                 // ps
    std::complex<double> corr;          // <A1^+ A2>
    double n1 = 0.0;                    // <A1^+ A1> above vacuum
    double n2 = 0.0;
    double std_error = 0.0;             // standard error of corr
    std::vector<std::string> warnings;

    double ratio_bound_excess() const;  // |corr| - sqrt(n1 n2) - 3 stderr
};

CorrelationResult perturbative_ops(const LangevinParams& params, double delay);

CorrelationResult integrate_langevin(const LangevinParams& params, double delay);

struct NormReport {
    double horizon = 0.0;
    double expected_norm = 1.0;
    std::vector<double> times;
    std::vector<double> mean_norm;      // <|b|^2> per sample time
    std::vector<double> std_error;
    double final_norm = 0.0;
    double final_std_error = 0.0;
    double drift_slope = 0.0;           // d<|b|^2>/dt from a straight-line fit
    double drift_slope_error = 0.0;
    bool preserved = false;             // final within 3 sigma of expected_norm
};

// Free phonon decay (coupling must be 0) starting from the equilibrium state.
NormReport norm_preservation_check(const LangevinParams& params, double horizon,
                                   std::size_t samples = 50);

struct DecayTrace {
    std::vector<double> times;
    std::vector<double> values;
    double fitted_rate = 0.0;           // from a log-linear least-squares fit
    std::vector<double> amplitude;      // <b>(t) / <b>(0), same trajectories
    double amplitude_rate = 0.0;
};

// Phonon initially displaced to hold `initial_occupation` excess quanta; tracks
// the excess occupation, which relaxes at twice the rate of the mean amplitude.
DecayTrace population_decay(const LangevinParams& params, double initial_occupation,
                            double horizon, std::size_t samples = 20);

// Exponential rate of |corr| across the given delays (log-linear fit).
double correlation_decay_rate(const std::vector<CorrelationResult>& results);

}  // namespace tcups::quantum
