#include "tcups/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "tcups/errors.hpp"
#include "tcups/least_squares.hpp"
#include "tcups/physics.hpp"
#include "tcups/rng.hpp"
#include "tcups/stats.hpp"

namespace tcups::analysis {

namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 2.0 * physics::kPi;
constexpr double kFourLn2 = 2.772588722239781;
constexpr double kMaxVisibility = 1.05;
constexpr double kSidebandWindow = 0.10;
constexpr double kDetectionThreshold = 4.0;
constexpr double kNumericalZero = 1e-9;

// Spectrum reduced to (optical frequency, amount per sample).
struct Samples {
    std::vector<double> nu;
    std::vector<double> amount;
    bool poisson = false;
    double reference = 0.0;  // amount-weighted mean frequency
    double rms_width = 0.0;  // amount-weighted rms frequency spread
};

Samples from_spectrum(const Spectrum& s) {
    Samples out;
    out.nu = optical_frequencies(s);
    const double pitch = s.pitch();
    out.amount.assign(s.intensity().begin(), s.intensity().end());
    for (double& a : out.amount) a *= pitch;
    return out;
}

Samples from_counts(const instrument::CountsSpectrum& s) {
    s.validate();
    Samples out;
    out.nu.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out.nu[i] = physics::kC_nm_per_ps / s.bins[i];
    out.amount = s.counts;
    out.poisson = s.integer_counts;
    return out;
}

void prepare(Samples& s, double expected_delay) {
    if (!(expected_delay > 0.0) || !std::isfinite(expected_delay)) {
        throw AnalysisError("expected delay must be positive to locate a fringe sideband");
    }
    const double total = std::accumulate(s.amount.begin(), s.amount.end(), 0.0);
    if (!(total > 0.0)) throw AnalysisError("spectrum is empty (all intensity zero)");
    double max_gap = 0.0;
    for (std::size_t i = 1; i < s.nu.size(); ++i) max_gap = std::max(max_gap, std::abs(s.nu[i] - s.nu[i - 1]));
    if (max_gap > 0.25 / expected_delay * (1.0 + 1e-9)) {
        throw AnalysisError("fringes undersampled: fewer than 4 samples per fringe period");
    }
    double m1 = 0.0;
    for (std::size_t i = 0; i < s.nu.size(); ++i) m1 += s.amount[i] * s.nu[i];
    s.reference = m1 / total;
    double m2 = 0.0;
    for (std::size_t i = 0; i < s.nu.size(); ++i) {
        m2 += s.amount[i] * (s.nu[i] - s.reference) * (s.nu[i] - s.reference);
    }
    s.rms_width = std::sqrt(m2 / total);
}

cd transform(const Samples& s, std::span<const double> amount, double t) {
    cd acc{};
    for (std::size_t i = 0; i < s.nu.size(); ++i) {
        const double phase = kTwoPi * (s.nu[i] - s.reference) * t;
        acc += amount[i] * cd{std::cos(phase), std::sin(phase)};
    }
    return acc;
}

struct Sideband {
    double v = 0.0;
    double delay = 0.0;
    double floor = 0.0;
    double phase = 0.0;  // arg S(t*)
};

Sideband locate_sideband(const Samples& s, double expected_delay) {
    const double dc = std::accumulate(s.amount.begin(), s.amount.end(), 0.0);
    const double corr_width = s.rms_width > 0.0 ? 1.0 / (kTwoPi * s.rms_width) : expected_delay;
    const double lo = (1.0 - kSidebandWindow) * expected_delay;
    const double hi = (1.0 + kSidebandWindow) * expected_delay;
    const double step = std::min(corr_width / 5.0, (hi - lo) / 10.0);
    const auto points = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;

    double best_t = lo, best = -1.0;
    for (std::size_t k = 0; k < points; ++k) {
        const double t = std::min(hi, lo + step * static_cast<double>(k));
        const double mag = std::abs(transform(s, s.amount, t));
        if (mag > best) {
            best = mag;
            best_t = t;
        }
    }
    // Golden-section refinement of |S(t)| around the best grid point.
    double a = std::max(lo, best_t - step), b = std::min(hi, best_t + step);
    const double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = std::abs(transform(s, s.amount, c)), fd = std::abs(transform(s, s.amount, d));
    for (int it = 0; it < 80 && (b - a) > 1e-12 * expected_delay; ++it) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a);
            fc = std::abs(transform(s, s.amount, c));
        } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a);
            fd = std::abs(transform(s, s.amount, d));
        }
    }
    const double t_mid = 0.5 * (a + b);
    const cd at_mid = transform(s, s.amount, t_mid);
    Sideband out;
    if (std::abs(at_mid) >= best) {
        out.delay = t_mid;
        out.v = 2.0 * std::abs(at_mid) / dc;
        out.phase = std::arg(at_mid);
    } else {
        const cd at_best = transform(s, s.amount, best_t);
        out.delay = best_t;
        out.v = 2.0 * best / dc;
        out.phase = std::arg(at_best);
    }

    // Noise floor: rms of 2|S(t)|/S(0) beyond the sideband, below the sampling limit.
    double max_gap = 0.0;
    for (std::size_t i = 1; i < s.nu.size(); ++i) max_gap = std::max(max_gap, std::abs(s.nu[i] - s.nu[i - 1]));
    const double f_lo = hi + 8.0 * corr_width;
    const double f_hi = std::min(f_lo + std::max(expected_delay, 20.0 * corr_width), 0.5 / max_gap);
    if (f_hi > f_lo) {
        constexpr int kFloorPoints = 48;
        double acc = 0.0;
        for (int k = 0; k < kFloorPoints; ++k) {
            const double t = f_lo + (f_hi - f_lo) * (k + 0.5) / kFloorPoints;
            acc += std::norm(transform(s, s.amount, t));
        }
        out.floor = 2.0 * std::sqrt(acc / kFloorPoints) / dc;
    }
    return out;
}

double fourier_visibility_at(const Samples& s, std::span<const double> amount,
                             std::span<const cd> phasor) {
    cd acc{};
    double dc = 0.0;
    for (std::size_t i = 0; i < amount.size(); ++i) {
        acc += amount[i] * phasor[i];
        dc += amount[i];
    }
    (void)s;
    return dc > 0.0 ? 2.0 * std::abs(acc) / dc : 0.0;
}

// Direct model: A exp(-4ln2 (nu-nu0)^2/W^2) (1 + v cos(2 pi (nu - ref) tau + psi)),
// parameters (A, nu0, W, v, psi, tau).
Eigen::VectorXd direct_residuals(const Samples& s, std::span<const double> amount,
                                 const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(amount.size()));
    for (std::size_t i = 0; i < amount.size(); ++i) {
        const double d = (s.nu[i] - p[1]) / p[2];
        const double env = p[0] * std::exp(-kFourLn2 * d * d);
        const double fringe = 1.0 + p[3] * std::cos(kTwoPi * (s.nu[i] - s.reference) * p[5] + p[4]);
        r[static_cast<Eigen::Index>(i)] = env * fringe - amount[i];
    }
    return r;
}

Eigen::VectorXd direct_fit(const Samples& s, std::span<const double> amount, Eigen::VectorXd start) {
    lsq::Problem problem;
    problem.residuals = [&](const Eigen::VectorXd& p) { return direct_residuals(s, amount, p); };
    problem.jacobian = [&](const Eigen::VectorXd& p) {
        return lsq::numeric_jacobian(problem.residuals, p, 1e-7);
    };
    lsq::Options opts;
    opts.parameter_tolerance = 1e-12;
    const auto res = lsq::solve(problem, std::move(start), opts);
    if (!res.converged) throw AnalysisError("direct fringe fit did not converge");
    return res.params;
}

Eigen::VectorXd direct_start(const Samples& s, const Sideband& sb) {
    const double width = 2.0 * std::sqrt(2.0 * std::log(2.0)) * s.rms_width;
    double shape = 0.0, total = 0.0;
    for (std::size_t i = 0; i < s.nu.size(); ++i) {
        const double d = (s.nu[i] - s.reference) / width;
        shape += std::exp(-kFourLn2 * d * d);
        total += s.amount[i];
    }
    Eigen::VectorXd p(6);
    p << total / shape, s.reference, width, std::min(sb.v, 1.0), -sb.phase, sb.delay;
    return p;
}

VisibilityEstimate extract(Samples s, double expected_delay, const VisibilityOptions& options) {
    prepare(s, expected_delay);
    const Sideband sb = locate_sideband(s, expected_delay);

    VisibilityEstimate est;
    est.noise_floor = sb.floor;
    est.sideband_delay = sb.delay;
    if (sb.v < kNumericalZero) {
        est.v = 0.0;
        return est;
    }
    if (sb.floor > 0.0 && sb.v < kDetectionThreshold * sb.floor) {
        throw AnalysisError("no fringe sideband above the noise floor near the expected delay");
    }

    std::vector<cd> phasor(s.nu.size());
    for (std::size_t i = 0; i < s.nu.size(); ++i) {
        const double phase = kTwoPi * (s.nu[i] - s.reference) * sb.delay;
        phasor[i] = {std::cos(phase), std::sin(phase)};
    }

    Eigen::VectorXd fitted;
    if (options.method == VisibilityMethod::FourierSideband) {
        est.v = sb.v;
    } else {
        fitted = direct_fit(s, s.amount, direct_start(s, sb));
        est.v = std::abs(fitted[3]);
        est.sideband_delay = fitted[5];
    }

    if (s.poisson && options.bootstrap_samples >= 2) {
        const std::size_t nboot = options.method == VisibilityMethod::FourierSideband
                                      ? options.bootstrap_samples
                                      : std::max<std::size_t>(2, options.bootstrap_samples / 2);
        std::vector<double> draws;
        draws.reserve(nboot);
        std::vector<double> resampled(s.amount.size());
        for (std::size_t b = 0; b < nboot; ++b) {
            Engine rng = substream(options.seed, Stream::Bootstrap, b);
            for (std::size_t i = 0; i < resampled.size(); ++i) {
                const double m = s.amount[i];
                resampled[i] = m > 0.0 ? static_cast<double>(std::poisson_distribution<long long>(m)(rng)) : 0.0;
            }
            if (options.method == VisibilityMethod::FourierSideband) {
                draws.push_back(fourier_visibility_at(s, resampled, phasor));
            } else {
                draws.push_back(std::abs(direct_fit(s, resampled, fitted)[3]));
            }
        }
        est.std_error = stats::stddev(draws);
    }
    est.v = std::min(est.v, kMaxVisibility);
    return est;
}

}  // namespace

std::string_view method_name(VisibilityMethod m) {
    return m == VisibilityMethod::FourierSideband ? "fourier_sideband" : "direct_fit";
}

VisibilityMethod parse_method(std::string_view name) {
    if (name == "fourier_sideband") return VisibilityMethod::FourierSideband;
    if (name == "direct_fit") return VisibilityMethod::DirectFit;
    throw DomainError("unknown visibility method '" + std::string(name) + "'");
}

VisibilityEstimate extract_visibility(const Spectrum& s, double expected_delay,
                                      const VisibilityOptions& options) {
    return extract(from_spectrum(s), expected_delay, options);
}

VisibilityEstimate extract_visibility(const instrument::CountsSpectrum& s, double expected_delay,
                                      const VisibilityOptions& options) {
    return extract(from_counts(s), expected_delay, options);
}

std::vector<VisibilityPoint> renormalize(std::span<const RawVisibility> raw) {
    std::vector<VisibilityPoint> out;
    out.reserve(raw.size());
    for (const auto& r : raw) {
        if (!(r.v_laser > kMinLaserVisibility)) {
            throw AnalysisError("laser visibility too low to renormalise (<= 0.05)");
        }
        VisibilityPoint p;
        p.delay = r.delay;
        p.v_stokes = r.v_stokes;
        p.v_laser = r.v_laser;
        p.v_norm = r.v_stokes / r.v_laser;
        const double a = r.stokes_error / r.v_laser;
        const double b = r.v_stokes * r.laser_error / (r.v_laser * r.v_laser);
        p.std_error = std::sqrt(a * a + b * b);
        out.push_back(p);
    }
    return out;
}

namespace models {

double decay(double tau, const Eigen::Vector2d& p) { return p[0] * std::exp(-p[1] * tau); }

Eigen::Vector2d decay_gradient(double tau, const Eigen::Vector2d& p) {
    const double e = std::exp(-p[1] * tau);
    return {e, -tau * p[0] * e};
}

double lorentzian(double x, const Eigen::Vector4d& p) {
    const double hw = 0.5 * p[1];
    const double dx = x - p[0];
    return p[2] * hw * hw / (dx * dx + hw * hw) + p[3];
}

Eigen::Vector4d lorentzian_gradient(double x, const Eigen::Vector4d& p) {
    const double hw = 0.5 * p[1];
    const double dx = x - p[0];
    const double den = dx * dx + hw * hw;
    const double shape = hw * hw / den;
    const double d_center = p[2] * hw * hw * 2.0 * dx / (den * den);
    // d/dw of hw^2/(dx^2+hw^2) with hw = w/2.
    const double d_fwhm = p[2] * hw * dx * dx / (den * den);
    return {d_center, d_fwhm, shape, 1.0};
}

}  // namespace models

std::optional<double> DecayFitResult::lifetime() const {
    if (at_boundary || !(gamma > 0.0)) return std::nullopt;
    return 1.0 / gamma;
}

std::optional<double> DecayFitResult::linewidth() const {
    if (at_boundary || !(gamma > 0.0)) return std::nullopt;
    return physics::linewidth_from_gamma(gamma);
}

DecayFitResult fit_decay(std::span<const VisibilityPoint> points, const DecayFitOptions& options) {
    if (points.size() < 3) throw AnalysisError("decay fit needs at least 3 visibility points");
    std::vector<double> delays;
    for (const auto& p : points) delays.push_back(p.delay);
    std::sort(delays.begin(), delays.end());
    if (std::unique(delays.begin(), delays.end()) - delays.begin() < 3) {
        throw AnalysisError("decay fit needs at least 3 distinct delays");
    }
    const bool weighted = std::all_of(points.begin(), points.end(),
                                      [](const VisibilityPoint& p) { return p.std_error > 0.0; });
    const std::size_t n = points.size();
    std::vector<double> w(n, 1.0);
    if (weighted) {
        for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / points[i].std_error;
    }

    // Starting point from a log-linear fit over the positive visibilities.
    std::vector<double> lt, lv;
    for (const auto& p : points) {
        if (p.v_norm > 0.0) {
            lt.push_back(p.delay);
            lv.push_back(std::log(p.v_norm));
        }
    }
    double v0 = 1.0, gamma = 0.0;
    if (lt.size() >= 2 && std::adjacent_find(lt.begin(), lt.end(), std::not_equal_to<>()) != lt.end()) {
        const auto line = stats::fit_line(lt, lv);
        gamma = -line.slope;
        v0 = std::exp(line.intercept);
    } else {
        double vmax = 0.0;
        for (const auto& p : points) vmax = std::max(vmax, p.v_norm);
        v0 = vmax > 0.0 ? vmax : 1.0;
    }

    const bool fixed = options.fix_amplitude;
    lsq::Problem problem;
    problem.residuals = [&](const Eigen::VectorXd& q) {
        const Eigen::Vector2d p(fixed ? 1.0 : q[0], fixed ? q[0] : q[1]);
        Eigen::VectorXd r(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) {
            r[static_cast<Eigen::Index>(i)] = w[i] * (models::decay(points[i].delay, p) - points[i].v_norm);
        }
        return r;
    };
    problem.jacobian = [&](const Eigen::VectorXd& q) {
        const Eigen::Vector2d p(fixed ? 1.0 : q[0], fixed ? q[0] : q[1]);
        Eigen::MatrixXd j(static_cast<Eigen::Index>(n), fixed ? 1 : 2);
        for (std::size_t i = 0; i < n; ++i) {
            const Eigen::Vector2d g = models::decay_gradient(points[i].delay, p);
            const auto row = static_cast<Eigen::Index>(i);
            if (fixed) {
                j(row, 0) = w[i] * g[1];
            } else {
                j(row, 0) = w[i] * g[0];
                j(row, 1) = w[i] * g[1];
            }
        }
        return j;
    };
    Eigen::VectorXd start(fixed ? 1 : 2);
    if (fixed) start << gamma;
    else start << v0, gamma;

    const auto res = lsq::solve(problem, start);
    if (!res.converged) throw AnalysisError("decay fit did not converge within 200 iterations");

    const std::size_t npar = fixed ? 1 : 2;
    const double dof = static_cast<double>(n) - static_cast<double>(npar);
    const double reduced = dof > 0.0 ? res.chi_squared / dof : 0.0;
    const double scale = weighted ? std::max(1.0, reduced) : reduced;
    const Eigen::MatrixXd cov = res.covariance * scale;

    DecayFitResult out;
    out.weighted = weighted;
    out.tau_points = n;
    out.iterations = res.iterations;
    if (fixed) {
        out.v0 = 1.0;
        out.gamma = res.params[0];
        out.gamma_std_error = std::sqrt(std::max(0.0, cov(0, 0)));
    } else {
        out.v0 = res.params[0];
        out.gamma = res.params[1];
        out.v0_std_error = std::sqrt(std::max(0.0, cov(0, 0)));
        out.gamma_std_error = std::sqrt(std::max(0.0, cov(1, 1)));
    }
    double ss = 0.0;
    for (const auto& p : points) {
        const double d = models::decay(p.delay, {out.v0, out.gamma}) - p.v_norm;
        ss += d * d;
    }
    out.residual_rms = std::sqrt(ss / static_cast<double>(n));
    if (out.gamma < 1e-12) {
        if (out.gamma < -3.0 * out.gamma_std_error - 1e-12) {
            throw AnalysisError("visibility grows with delay; no decay to fit");
        }
        out.gamma = 0.0;
        out.at_boundary = true;
    }
    return out;
}

LorentzianFit fit_lorentzian(const Spectrum& s) {
    const auto x = s.grid();
    const auto y = s.intensity();
    const std::size_t n = s.size();
    if (n < 5) throw AnalysisError("Lorentzian fit needs at least 5 samples");

    // Baseline and its noise from the outer fifth of the window on each side.
    const std::size_t edge = std::max<std::size_t>(2, n / 10);
    std::vector<double> tails;
    for (std::size_t i = 0; i < edge; ++i) {
        tails.push_back(y[i]);
        tails.push_back(y[n - 1 - i]);
    }
    const double baseline = stats::mean(tails);
    const double noise = stats::stddev(tails);
    const auto peak_it = std::max_element(y.begin(), y.end());
    const std::size_t ipk = static_cast<std::size_t>(peak_it - y.begin());
    const double height = *peak_it - baseline;
    if (!(height > 0.0) || height < 5.0 * noise) {
        throw AnalysisError("no Lorentzian peak above 5x the baseline noise");
    }
    // Half-maximum crossings for the starting width.
    const double half = baseline + 0.5 * height;
    std::size_t l = ipk, r = ipk;
    while (l > 0 && y[l] > half) --l;
    while (r + 1 < n && y[r] > half) ++r;
    const double width0 = std::max(x[r] - x[l], 2.0 * s.pitch());

    lsq::Problem problem;
    problem.residuals = [&](const Eigen::VectorXd& q) {
        const Eigen::Vector4d p = q;
        Eigen::VectorXd res(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) res[static_cast<Eigen::Index>(i)] = models::lorentzian(x[i], p) - y[i];
        return res;
    };
    problem.jacobian = [&](const Eigen::VectorXd& q) {
        const Eigen::Vector4d p = q;
        Eigen::MatrixXd j(static_cast<Eigen::Index>(n), 4);
        for (std::size_t i = 0; i < n; ++i) j.row(static_cast<Eigen::Index>(i)) = models::lorentzian_gradient(x[i], p).transpose();
        return j;
    };
    Eigen::VectorXd start(4);
    start << x[ipk], width0, height, baseline;
    lsq::Options opts;
    opts.parameter_tolerance = 1e-13;
    const auto res = lsq::solve(problem, start, opts);
    if (!res.converged) throw AnalysisError("Lorentzian fit did not converge within 200 iterations");

    LorentzianFit out;
    out.center = res.params[0];
    out.fwhm = std::abs(res.params[1]);
    out.amplitude = res.params[2];
    out.offset = res.params[3];
    out.iterations = res.iterations;
    if (!(out.fwhm > 0.0)) throw AnalysisError("Lorentzian fit collapsed to zero width");
    if (out.center < x.front() || out.center > x.back()) {
        throw AnalysisError("Lorentzian centre fell outside the fitted window");
    }
    const double dof = static_cast<double>(n) - 4.0;
    const Eigen::MatrixXd cov = res.covariance * (res.chi_squared / dof);
    out.center_error = std::sqrt(std::max(0.0, cov(0, 0)));
    out.fwhm_error = std::sqrt(std::max(0.0, cov(1, 1)));
    out.amplitude_error = std::sqrt(std::max(0.0, cov(2, 2)));
    out.offset_error = std::sqrt(std::max(0.0, cov(3, 3)));
    return out;
}

Reconciliation reconcile(const DecayFitResult& decay, const LorentzianFit& line) {
    if (!(line.fwhm > 0.0)) throw DomainError("line fit FWHM must be positive");
    Reconciliation r;
    r.linewidth_time_domain = decay.gamma > 0.0 ? physics::linewidth_from_gamma(decay.gamma) : 0.0;
    r.linewidth_line_fit = line.fwhm;
    r.ratio = r.linewidth_time_domain / line.fwhm;
    r.agree = std::abs(r.ratio - 1.0) <= 0.5;
    return r;
}

double chromatic_correction(const instrument::InstrumentModel& model, double laser_nm, double stokes_nm,
                            double delay) {
    auto factor = [&](double nm) {
        const double period = physics::fringe_spacing(nm, delay);
        return instrument::gaussian_visibility_factor(model.resolution_fwhm, period) *
               instrument::pixel_visibility_factor(model.pixel_width, period);
    };
    return factor(laser_nm) / factor(stokes_nm);
}

double centroid_wavelength(const instrument::CountsSpectrum& s) {
    double w = 0.0, wx = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        w += s.counts[i];
        wx += s.counts[i] * s.bins[i];
    }
    if (!(w > 0.0)) throw AnalysisError("spectrum is empty (all counts zero)");
    return wx / w;
}

}  // namespace tcups::analysis
