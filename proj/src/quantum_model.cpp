#include "tcups/quantum_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "tcups/errors.hpp"
#include "tcups/parallel.hpp"
#include "tcups/physics.hpp"
#include "tcups/rng.hpp"
#include "tcups/stats.hpp"

namespace tcups::quantum {

namespace {

using cd = std::complex<double>;

constexpr double kRegimeThreshold = 0.1;
constexpr std::size_t kTrajectoryChunk = 256;
// Sign patterns applied to the two Stokes vacuum amplitudes. Averaging over
// them removes every term odd in either vacuum amplitude (antithetic variates);
// the vacuum distribution is symmetric so the estimator stays unbiased.
constexpr std::array<double, 4> kSign1{1.0, -1.0, 1.0, -1.0};
constexpr std::array<double, 4> kSign2{1.0, 1.0, -1.0, -1.0};

// Complex normal deviate with E|z|^2 = 1 (Box-Muller).
cd complex_normal(Engine& rng) {
    const double u1 = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-std::log(u1));
    const double phi = 2.0 * physics::kPi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

struct Segment {
    double length;
    bool pump1;
    bool pump2;
};

// Time segments of the two-pulse protocol: pump 1 on [0, tp), pump 2 on
// [delay, delay + tp), free decay elsewhere.
std::vector<Segment> protocol(double tp, double delay) {
    std::vector<double> cuts{0.0, tp, delay, delay + tp};
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Segment> out;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i - 1] + cuts[i]);
        out.push_back({cuts[i] - cuts[i - 1], mid < tp, mid >= delay && mid < delay + tp});
    }
    return out;
}

struct Drift {
    cd a1, a2, b;
};

// Right-hand side of the equations of motion for one sign variant.
Drift drift(cd a1, cd a2, cd b, double g1, double g2, double gamma, bool coupled) {
    constexpr cd minus_i{0.0, -1.0};
    Drift d{cd{}, cd{}, -gamma * b};
    if (coupled) {
        d.a1 = minus_i * g1 * std::conj(b);
        d.a2 = minus_i * g2 * std::conj(b);
        d.b += minus_i * (g1 * std::conj(a1) + g2 * std::conj(a2));
    }
    return d;
}

struct Moments {
    double re = 0, im = 0, re2 = 0, im2 = 0, n1 = 0, n2 = 0;
};

void check_delay(double delay) {
    if (!(delay >= 0.0) || !std::isfinite(delay)) throw DomainError("delay must be >= 0");
}

}  // namespace

void LangevinParams::validate() const {
    if (!(coupling >= 0.0) || !std::isfinite(coupling)) throw DomainError("coupling must be >= 0");
    if (!(pump_duration > 0.0)) throw DomainError("pump duration must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw DomainError("gamma must be >= 0");
    if (!(dt > 0.0)) throw DomainError("integrator step must be positive");
    if (trajectories < 2) throw DomainError("need at least two trajectories");
    if (!(thermal_population >= 0.0)) throw DomainError("thermal population must be >= 0");
    double resolve = pump_duration;
    if (gamma > 0.0) resolve = std::min(resolve, 1.0 / gamma);
    if (dt > resolve / 20.0 * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "integrator step dt = " << dt << " ps exceeds min(pump, 1/Gamma)/20 = "
            << resolve / 20.0 << " ps";
        throw DomainError(msg.str());
    }
}

std::vector<std::string> LangevinParams::regime_warnings() const {
    std::vector<std::string> out;
    if (coupling * pump_duration > kRegimeThreshold) {
        std::ostringstream msg;
        msg << "weak-coupling limit violated: g*tau_pump = " << coupling * pump_duration;
        out.push_back(msg.str());
    }
    if (gamma * pump_duration > kRegimeThreshold) {
        std::ostringstream msg;
        msg << "transient limit violated: Gamma*tau_pump = " << gamma * pump_duration;
        out.push_back(msg.str());
    }
    return out;
}

double CorrelationResult::ratio_bound_excess() const {
    return std::abs(corr) - std::sqrt(std::max(n1, 0.0) * std::max(n2, 0.0)) - 3.0 * std_error;
}

CorrelationResult perturbative_ops(const LangevinParams& params, double delay) {
    params.validate();
    check_delay(delay);
    const double kappa = params.coupling * params.pump_duration;
    const double n = kappa * kappa * (params.thermal_population + 1.0);
    CorrelationResult r;
    r.delay = delay;
    r.n1 = n;
    r.n2 = n;
    r.corr = n * std::exp(-params.gamma * delay);
    r.std_error = 0.0;
    r.warnings = params.regime_warnings();
    return r;
}

CorrelationResult integrate_langevin(const LangevinParams& params, double delay) {
    params.validate();
    check_delay(delay);
    const auto segments = protocol(params.pump_duration, delay);
    const double g = params.coupling;
    const double gamma = params.gamma;
    const double norm = params.phonon_norm();
    const bool noisy = params.langevin_noise && gamma > 0.0;

    const std::size_t chunks = (params.trajectories + kTrajectoryChunk - 1) / kTrajectoryChunk;
    std::vector<Moments> partial(chunks);
    parallel_for(chunks, params.workers, [&](std::size_t c) {
        Moments m;
        const std::size_t lo = c * kTrajectoryChunk;
        const std::size_t hi = std::min(params.trajectories, lo + kTrajectoryChunk);
        for (std::size_t traj = lo; traj < hi; ++traj) {
            Engine rng = substream(params.seed, Stream::Langevin, traj);
            const cd x1 = complex_normal(rng);
            const cd x2 = complex_normal(rng);
            const cd xb = std::sqrt(norm) * complex_normal(rng);
            std::array<cd, 4> a1, a2, b;
            for (std::size_t v = 0; v < 4; ++v) {
                a1[v] = kSign1[v] * x1;
                a2[v] = kSign2[v] * x2;
                b[v] = xb;
            }
            for (const Segment& seg : segments) {
                const auto steps = static_cast<std::size_t>(std::ceil(seg.length / params.dt - 1e-9));
                const double h = seg.length / static_cast<double>(steps);
                const double g1 = seg.pump1 ? g : 0.0;
                const double g2 = seg.pump2 ? g : 0.0;
                const double kick = noisy ? std::sqrt(2.0 * gamma * norm * h) : 0.0;
                const bool coupled = g1 != 0.0 || g2 != 0.0;
                for (std::size_t s = 0; s < steps; ++s) {
                    const cd noise = noisy ? kick * complex_normal(rng) : cd{};
                    for (std::size_t v = 0; v < 4; ++v) {
                        // Stochastic Heun: trapezoidal drift, additive noise enters once.
                        const Drift d0 = drift(a1[v], a2[v], b[v], g1, g2, gamma, coupled);
                        const cd pa1 = a1[v] + h * d0.a1;
                        const cd pa2 = a2[v] + h * d0.a2;
                        const cd pb = b[v] + h * d0.b + noise;
                        const Drift d1 = drift(pa1, pa2, pb, g1, g2, gamma, coupled);
                        a1[v] += 0.5 * h * (d0.a1 + d1.a1);
                        a2[v] += 0.5 * h * (d0.a2 + d1.a2);
                        b[v] += 0.5 * h * (d0.b + d1.b) + noise;
                    }
                }
            }
            cd corr{};
            double n1 = 0.0, n2 = 0.0;
            for (std::size_t v = 0; v < 4; ++v) {
                corr += std::conj(a1[v]) * a2[v];
                n1 += std::norm(a1[v]);
                n2 += std::norm(a2[v]);
            }
            corr *= 0.25;
            // Subtracting the sampled vacuum norm is a control variate with known mean 1.
            n1 = 0.25 * n1 - std::norm(x1);
            n2 = 0.25 * n2 - std::norm(x2);
            m.re += corr.real();
            m.im += corr.imag();
            m.re2 += corr.real() * corr.real();
            m.im2 += corr.imag() * corr.imag();
            m.n1 += n1;
            m.n2 += n2;
        }
        partial[c] = m;
    });

    Moments total;
    for (const auto& m : partial) {
        total.re += m.re;
        total.im += m.im;
        total.re2 += m.re2;
        total.im2 += m.im2;
        total.n1 += m.n1;
        total.n2 += m.n2;
    }
    const double n = static_cast<double>(params.trajectories);
    const double mre = total.re / n;
    const double mim = total.im / n;
    const double var_re = std::max(0.0, (total.re2 - n * mre * mre) / (n - 1.0));
    const double var_im = std::max(0.0, (total.im2 - n * mim * mim) / (n - 1.0));

    CorrelationResult r;
    r.delay = delay;
    r.corr = 0.5 * cd{mre, mim};
    r.n1 = 0.5 * total.n1 / n;
    r.n2 = 0.5 * total.n2 / n;
    r.std_error = 0.5 * std::sqrt((var_re + var_im) / n);
    r.warnings = params.regime_warnings();
    return r;
}

namespace {

// Free damped phonon mode, sampled at `samples` equally spaced times in
// (0, horizon]. Returns per-sample sums of |b|^2 and |b|^4 over trajectories.
struct FreeDecaySums {
    std::vector<double> s1, s2;
    std::vector<double> re;  // sum of Re b
};

FreeDecaySums free_decay(const LangevinParams& params, cd displacement, double horizon,
                         std::size_t samples) {
    const double gamma = params.gamma;
    const double norm = params.phonon_norm();
    const bool noisy = params.langevin_noise && gamma > 0.0;
    const double interval = horizon / static_cast<double>(samples);
    const auto steps = static_cast<std::size_t>(std::ceil(interval / params.dt - 1e-9));
    const double h = interval / static_cast<double>(steps);
    const double kick = noisy ? std::sqrt(2.0 * gamma * norm * h) : 0.0;

    const std::size_t chunks = (params.trajectories + kTrajectoryChunk - 1) / kTrajectoryChunk;
    std::vector<FreeDecaySums> partial(chunks);
    parallel_for(chunks, params.workers, [&](std::size_t c) {
        FreeDecaySums acc{std::vector<double>(samples, 0.0), std::vector<double>(samples, 0.0),
                          std::vector<double>(samples, 0.0)};
        const std::size_t lo = c * kTrajectoryChunk;
        const std::size_t hi = std::min(params.trajectories, lo + kTrajectoryChunk);
        for (std::size_t traj = lo; traj < hi; ++traj) {
            Engine rng = substream(params.seed, Stream::Langevin, traj, 1);
            cd b = displacement + std::sqrt(norm) * complex_normal(rng);
            for (std::size_t k = 0; k < samples; ++k) {
                for (std::size_t s = 0; s < steps; ++s) {
                    const cd noise = noisy ? kick * complex_normal(rng) : cd{};
                    const cd predictor = b - gamma * h * b + noise;
                    b += -0.5 * gamma * h * (b + predictor) + noise;
                }
                const double p = std::norm(b);
                acc.s1[k] += p;
                acc.s2[k] += p * p;
                acc.re[k] += b.real();
            }
        }
        partial[c] = std::move(acc);
    });
    FreeDecaySums total{std::vector<double>(samples, 0.0), std::vector<double>(samples, 0.0),
                        std::vector<double>(samples, 0.0)};
    for (const auto& p : partial) {
        for (std::size_t k = 0; k < samples; ++k) {
            total.s1[k] += p.s1[k];
            total.s2[k] += p.s2[k];
            total.re[k] += p.re[k];
        }
    }
    return total;
}

}  // namespace

NormReport norm_preservation_check(const LangevinParams& params, double horizon,
                                   std::size_t samples) {
    params.validate();
    if (params.coupling != 0.0) {
        throw DomainError("norm preservation check requires coupling = 0");
    }
    if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
    if (samples < 2) throw DomainError("need at least two sample times");

    const auto sums = free_decay(params, cd{}, horizon, samples);
    const double n = static_cast<double>(params.trajectories);
    NormReport r;
    r.horizon = horizon;
    r.expected_norm = params.phonon_norm();
    for (std::size_t k = 0; k < samples; ++k) {
        const double m = sums.s1[k] / n;
        const double var = std::max(0.0, (sums.s2[k] - n * m * m) / (n - 1.0));
        r.times.push_back(horizon * static_cast<double>(k + 1) / static_cast<double>(samples));
        r.mean_norm.push_back(m);
        r.std_error.push_back(std::sqrt(var / n));
    }
    r.final_norm = r.mean_norm.back();
    r.final_std_error = r.std_error.back();
    const auto line = stats::fit_line(r.times, r.mean_norm);
    r.drift_slope = line.slope;
    r.drift_slope_error = line.slope_error;
    const double tol = 3.0 * r.final_std_error;
    r.preserved = std::abs(r.final_norm - r.expected_norm) <= tol ||
                  (tol == 0.0 && r.final_norm == r.expected_norm);
    return r;
}

DecayTrace population_decay(const LangevinParams& params, double initial_occupation,
                            double horizon, std::size_t samples) {
    params.validate();
    if (!(initial_occupation > 0.0)) throw DomainError("initial occupation must be positive");
    if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
    if (samples < 2) throw DomainError("need at least two sample times");
    // Scaled amplitude: an excess of n quanta corresponds to |beta|^2 = 2 n.
    const cd beta{std::sqrt(2.0 * initial_occupation), 0.0};
    const auto sums = free_decay(params, beta, horizon, samples);
    const double n = static_cast<double>(params.trajectories);
    DecayTrace trace;
    std::vector<double> logs, amp_logs;
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = horizon * static_cast<double>(k + 1) / static_cast<double>(samples);
        const double excess = 0.5 * (sums.s1[k] / n - params.phonon_norm());
        trace.times.push_back(t);
        trace.values.push_back(excess);
        if (!(excess > 0.0)) throw AnalysisError("excess occupation fell below the noise floor");
        logs.push_back(std::log(excess));
        const double amp = sums.re[k] / n / beta.real();
        trace.amplitude.push_back(amp);
        if (!(amp > 0.0)) throw AnalysisError("mean amplitude fell below the noise floor");
        amp_logs.push_back(std::log(amp));
    }
    trace.fitted_rate = -stats::fit_line(trace.times, logs).slope;
    trace.amplitude_rate = -stats::fit_line(trace.times, amp_logs).slope;
    return trace;
}

double correlation_decay_rate(const std::vector<CorrelationResult>& results) {
    std::vector<double> t, logs;
    for (const auto& r : results) {
        const double mag = std::abs(r.corr);
        if (!(mag > 0.0)) throw AnalysisError("correlation vanished; decay rate undefined");
        t.push_back(r.delay);
        logs.push_back(std::log(mag));
    }
    return -stats::fit_line(t, logs).slope;
}

}  // namespace tcups::quantum
