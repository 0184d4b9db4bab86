#include "tcups/classical_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tcups/errors.hpp"
#include "tcups/parallel.hpp"

namespace tcups::classical {

namespace {

constexpr double kFourLn2 = 2.772588722239781;
constexpr double kTwoPi = 2.0 * physics::kPi;
constexpr double kEdgeLimit = 1e-3;
constexpr std::size_t kShotChunk = 8192;

// Uniform deviate in (0, 1) from a 64-bit word.
double open_unit(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Cauchy frequency offset (rad/ps) with half width `gamma`.
double cauchy_offset(double gamma, double u) {
    return gamma * std::tan(physics::kPi * (u - 0.5));
}

}  // namespace

void PulsePair::validate() const {
    if (!(center_wavelength > 0.0)) throw DomainError("pulse centre wavelength must be positive");
    if (!(duration_fwhm > 0.0)) throw DomainError("pulse duration must be positive");
    if (!(delay >= 0.0) || !std::isfinite(delay)) throw DomainError("pulse delay must be >= 0");
    if (!std::isfinite(relative_phase)) throw DomainError("relative phase must be finite");
}

double PulsePair::center_frequency() const { return physics::nm_to_thz(center_wavelength); }

double PulsePair::bandwidth() const { return kGaussianTimeBandwidth / (duration_fwhm * 1e-3); }

PhaseModel parse_phase_model(std::string_view name) {
    if (name == "cauchy_frequency") return PhaseModel::CauchyFrequency;
    if (name == "direct_exponential") return PhaseModel::DirectExponential;
    throw DomainError("unknown phase model '" + std::string(name) + "'");
}

std::string_view phase_model_name(PhaseModel m) {
    return m == PhaseModel::CauchyFrequency ? "cauchy_frequency" : "direct_exponential";
}

void ShotEnsemble::validate() const {
    if (shots < 1) throw DomainError("ensemble needs at least one shot");
}

Spectrum single_pulse_spectrum(const PulsePair& pulse, const Grid& grid) {
    pulse.validate();
    if (grid.count < 2 || !(grid.step > 0.0)) throw DomainError("invalid grid");
    const double nu0 = pulse.center_frequency();
    const double width = pulse.bandwidth();
    auto envelope = [&](double nu) {
        const double d = (nu - nu0) / width;
        return std::exp(-kFourLn2 * d * d);
    };
    if (envelope(grid.frequency_at(0)) > kEdgeLimit ||
        envelope(grid.frequency_at(grid.count - 1)) > kEdgeLimit) {
        throw DomainError("grid too narrow: pulse envelope at the grid edge exceeds 1e-3 of peak");
    }
    std::vector<double> out(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) out[i] = envelope(grid.frequency_at(i));
    return Spectrum(grid, std::move(out));
}

double sample_phase(PhaseModel model, double gamma, double delay, Engine& rng) {
    if (!(gamma >= 0.0)) throw DomainError("gamma must be non-negative");
    if (model == PhaseModel::DirectExponential || gamma == 0.0) return 0.0;
    return cauchy_offset(gamma, open_unit(rng())) * delay;
}

Spectrum fringe_spectrum(const PulsePair& pulse, const Grid& grid, PhasorMean fringe,
                         std::size_t shots) {
    const Spectrum single = single_pulse_spectrum(pulse, grid);
    const auto env = single.intensity();
    std::vector<double> out(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
        const double phase = kTwoPi * grid.frequency_at(i) * pulse.delay;
        const double mod = fringe.cos_mean * std::cos(phase) - fringe.sin_mean * std::sin(phase);
        // 1 + mod >= 0 analytically; clamp rounding noise at the fringe minima.
        out[i] = std::max(0.0, 2.0 * env[i] * (1.0 + mod));
    }
    return Spectrum(grid, std::move(out), shots);
}

Spectrum pair_spectrum(const PulsePair& pulse, const Grid& grid) {
    return fringe_spectrum(pulse, grid,
                           {std::cos(pulse.relative_phase), std::sin(pulse.relative_phase)});
}

PhasorMean ensemble_phasor(double gamma, double delay, const ShotEnsemble& ensemble) {
    ensemble.validate();
    if (!(gamma >= 0.0)) throw DomainError("gamma must be non-negative");
    if (!(delay >= 0.0)) throw DomainError("delay must be non-negative");
    if (ensemble.phase_model == PhaseModel::DirectExponential) {
        return {std::exp(-gamma * delay), 0.0};
    }
    if (gamma == 0.0 || delay == 0.0) return {1.0, 0.0};

    // Shot s draws its phase from a counter-based stream keyed by (seed, s);
    // chunk sums are combined in chunk order.
    const std::uint64_t key = splitmix64(ensemble.seed ^ splitmix64(
        static_cast<std::uint64_t>(Stream::ClassicalShots)));
    const std::size_t chunks = (ensemble.shots + kShotChunk - 1) / kShotChunk;
    std::vector<PhasorMean> partial(chunks, {0.0, 0.0});
    parallel_for(chunks, ensemble.workers, [&](std::size_t c) {
        const std::size_t lo = c * kShotChunk;
        const std::size_t hi = std::min(ensemble.shots, lo + kShotChunk);
        double cs = 0.0, sn = 0.0;
        for (std::size_t s = lo; s < hi; ++s) {
            const double theta = cauchy_offset(gamma, open_unit(splitmix64(key + s))) * delay;
            cs += std::cos(theta);
            sn += std::sin(theta);
        }
        partial[c] = {cs, sn};
    });
    PhasorMean total{0.0, 0.0};
    for (const auto& p : partial) {
        total.cos_mean += p.cos_mean;
        total.sin_mean += p.sin_mean;
    }
    const double n = static_cast<double>(ensemble.shots);
    return {total.cos_mean / n, total.sin_mean / n};
}

Spectrum averaged_spectrum(const ExcitationConfig& config,
                           const physics::MaterialParams& material,
                           const ShotEnsemble& ensemble, const Grid& grid) {
    material.validate();
    PulsePair stokes;
    stokes.center_wavelength = physics::stokes_wavelength(config.pump_wavelength,
                                                          material.raman_shift);
    stokes.duration_fwhm = config.duration_fwhm;
    stokes.delay = config.delay;
    stokes.validate();
    // The mean of 2|E1|^2 (1 + cos(omega tau + theta_s)) over shots equals the
    // fringe spectrum built from the mean phasor of exp(i theta_s).
    const PhasorMean mean = ensemble_phasor(material.gamma, config.delay, ensemble);
    return fringe_spectrum(stokes, grid, mean, ensemble.shots);
}

}  // namespace tcups::classical
