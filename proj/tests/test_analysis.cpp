#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tcups/analysis.hpp"
#include "tcups/classical_model.hpp"
#include "tcups/errors.hpp"
#include "tcups/instrument.hpp"
#include "tcups/least_squares.hpp"
#include "tcups/physics.hpp"

using namespace tcups;
using namespace tcups::analysis;
using doctest::Approx;

namespace {

std::vector<double> default_delays() {
    std::vector<double> t;
    for (int i = 1; i <= 10; ++i) t.push_back(0.4 * i);
    return t;
}

std::vector<VisibilityPoint> decay_points(double v0, double gamma, double sigma) {
    std::vector<VisibilityPoint> pts;
    for (double t : default_delays()) {
        VisibilityPoint p;
        p.delay = t;
        p.v_norm = v0 * std::exp(-gamma * t);
        p.std_error = sigma;
        pts.push_back(p);
    }
    return pts;
}

Spectrum lorentz_line(double center, double fwhm, double amp, double offset, double shift = 0.0) {
    const Grid g = Grid::spanning(Axis::Wavenumber, 1300.0 + shift, 1364.0 + shift, 1281);
    std::vector<double> y;
    const Eigen::Vector4d p(center + shift, fwhm, amp, offset);
    for (double x : g.values()) y.push_back(models::lorentzian(x, p));
    return Spectrum(g, y);
}

// Pair spectrum with visibility v and fringe phase phi on the Stokes window.
Spectrum synthetic_pair(double tau, double v, double phi) {
    classical::PulsePair p;
    p.center_wavelength = oracle::kStokes788;
    p.delay = tau;
    const double fwhm = oracle::kStokes788 * oracle::kStokes788 * oracle::kBandwidth80fs / 299792.458;
    const Grid g{Axis::Wavelength, p.center_wavelength - 3 * fwhm, 0.025 / 8, static_cast<std::size_t>(6 * fwhm / (0.025 / 8)) + 1};
    return classical::fringe_spectrum(p, g, {v * std::cos(phi), v * std::sin(phi)});
}

template <int N>
void check_jacobian(const std::function<double(double, const Eigen::Matrix<double, N, 1>&)>& f,
                    const std::function<Eigen::Matrix<double, N, 1>(double, const Eigen::Matrix<double, N, 1>&)>& grad,
                    const std::vector<double>& xs, const Eigen::Matrix<double, N, 1>& p) {
    auto residuals = [&](const Eigen::VectorXd& q) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(xs.size()));
        for (std::size_t i = 0; i < xs.size(); ++i) r[static_cast<Eigen::Index>(i)] = f(xs[i], q);
        return r;
    };
    const Eigen::MatrixXd num = lsq::numeric_jacobian(residuals, p);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto g = grad(xs[i], p);
        for (int k = 0; k < N; ++k) {
            const double a = g[k], n = num(static_cast<Eigen::Index>(i), k);
            const double scale = std::max(std::abs(a), 1e-3 * num.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff());
            CHECK(std::abs(a - n) <= 1e-6 * scale + 1e-300);
        }
    }
}

}  // namespace

TEST_CASE("decay model Jacobian matches finite differences") {
    const std::vector<double> taus = default_delays();
    for (const Eigen::Vector2d p : {Eigen::Vector2d(1.0, 1.0 / 6.8), Eigen::Vector2d(0.7, 0.5), Eigen::Vector2d(2.0, 0.01)}) {
        check_jacobian<2>(models::decay, models::decay_gradient, taus, p);
    }
}

TEST_CASE("Lorentzian model Jacobian matches finite differences") {
    std::vector<double> xs;
    for (double x = 1320.0; x <= 1344.0; x += 0.37) xs.push_back(x);
    for (const Eigen::Vector4d p : {Eigen::Vector4d(1332.0, 1.95, 100.0, 3.0), Eigen::Vector4d(1331.2, 0.8, 5.0, 0.0),
                                    Eigen::Vector4d(1333.0, 4.0, 1.0, -0.5)}) {
        check_jacobian<4>(models::lorentzian, models::lorentzian_gradient, xs, p);
    }
}

TEST_CASE("Lorentzian round trip is exact without noise") {
    const auto fit = fit_lorentzian(lorentz_line(1332.0, 1.95, 1000.0, 20.0));
    CHECK(fit.fwhm == Approx(1.95).epsilon(1e-6 / 1.95));
    CHECK(fit.center == Approx(1332.0).epsilon(1e-9));
    CHECK(fit.amplitude == Approx(1000.0).epsilon(1e-6));
    CHECK(fit.offset == Approx(20.0).epsilon(1e-6));
}

TEST_CASE("Lorentzian FWHM is invariant under scaling and shifts") {
    const double base = fit_lorentzian(lorentz_line(1332.0, 1.95, 1000.0, 20.0)).fwhm;
    CHECK(fit_lorentzian(lorentz_line(1332.0, 1.95, 1000.0, 20.0).scaled(37.0)).fwhm ==
          Approx(base).epsilon(1e-10));
    CHECK(fit_lorentzian(lorentz_line(1332.0, 1.95, 1000.0, 20.0, 3.7)).fwhm == Approx(base).epsilon(1e-10));
}

TEST_CASE("Lorentzian fit with noise and failure modes") {
    std::mt19937_64 rng(2);
    const Spectrum clean = lorentz_line(1332.0, 1.95, 1000.0, 20.0);
    std::vector<double> y(clean.intensity().begin(), clean.intensity().end());
    for (auto& v : y) v = std::poisson_distribution<long>(v)(rng);
    const auto fit = fit_lorentzian(Spectrum(Axis::Wavenumber, std::vector<double>(clean.grid().begin(), clean.grid().end()), y));
    CHECK(std::abs(fit.fwhm - 1.95) < 4.0 * fit.fwhm_error);
    CHECK(fit.fwhm_error > 0.0);
    const Spectrum flat(Axis::Wavenumber, {1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, {1.0, 1.0, 1.0, 1.0, 1.0, 1.0});
    CHECK_THROWS_AS(fit_lorentzian(flat), AnalysisError);
}

TEST_CASE("decay fit recovers noiseless parameters") {
    const auto r = fit_decay(decay_points(0.93, 1.0 / 6.8, 0.01));
    CHECK(r.gamma == Approx(1.0 / 6.8).epsilon(1e-9));
    CHECK(r.v0 == Approx(0.93).epsilon(1e-9));
    CHECK(r.weighted);
    CHECK(*r.lifetime() == Approx(6.8).epsilon(1e-9));
    CHECK(*r.linewidth() == Approx(oracle::kLinewidth68).epsilon(1e-9));

    DecayFitOptions fixed;
    fixed.fix_amplitude = true;
    const auto f = fit_decay(decay_points(1.0, 0.2, 0.0), fixed);
    CHECK(f.gamma == Approx(0.2).epsilon(1e-9));
    CHECK(f.v0 == 1.0);
    CHECK_FALSE(f.weighted);
}

TEST_CASE("decay fit is scale equivariant") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n(0.0, 0.01);
    auto pts = decay_points(0.95, 0.15, 0.01);
    for (auto& p : pts) p.v_norm += n(rng);
    const auto a = fit_decay(pts);
    for (double k : {0.3, 2.5}) {
        auto scaled = pts;
        for (auto& p : scaled) {
            p.v_norm *= k;
            p.std_error *= k;
        }
        const auto b = fit_decay(scaled);
        CHECK(b.gamma == Approx(a.gamma).epsilon(1e-10));
        CHECK(b.v0 == Approx(k * a.v0).epsilon(1e-10));
    }
}

TEST_CASE("decay fit edge cases") {
    auto pts = decay_points(0.8, 0.0, 0.01);
    const auto flat = fit_decay(pts);
    CHECK(flat.at_boundary);
    CHECK(flat.gamma == 0.0);
    CHECK_FALSE(flat.lifetime().has_value());
    CHECK_FALSE(flat.linewidth().has_value());

    pts.resize(2);
    CHECK_THROWS_AS(fit_decay(pts), AnalysisError);
    auto same = decay_points(1.0, 0.1, 0.01);
    for (auto& p : same) p.delay = 1.0;
    CHECK_THROWS_AS(fit_decay(same), AnalysisError);
}

TEST_CASE("decay fit error bars are calibrated") {
    // 200 seeded trials with known Gaussian noise: coverage at one and two
    // reported standard errors should match the normal quantiles.
    const double gamma = 1.0 / 6.8, v0 = 0.97;
    std::mt19937_64 rng(20240601);
    int in1_g = 0, in2_g = 0, in1_v = 0, in2_v = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        auto pts = decay_points(v0, gamma, 0.0);
        for (auto& p : pts) {
            p.std_error = 0.004 + 0.002 * p.delay;  // heteroscedastic
            p.v_norm += std::normal_distribution<double>(0.0, p.std_error)(rng);
        }
        const auto r = fit_decay(pts);
        const double dg = std::abs(r.gamma - gamma) / r.gamma_std_error;
        const double dv = std::abs(r.v0 - v0) / r.v0_std_error;
        in1_g += dg <= 1.0;
        in2_g += dg <= 2.0;
        in1_v += dv <= 1.0;
        in2_v += dv <= 2.0;
    }
    CHECK(in2_g >= 190);
    CHECK(in2_v >= 190);
    CHECK(in1_g >= 120);
    CHECK(in1_g <= 160);
    CHECK(in1_v >= 120);
    CHECK(in1_v <= 160);
}

TEST_CASE("renormalisation by the laser channel") {
    std::vector<RawVisibility> raw{{1.0, 0.6, 0.01, 0.8, 0.02}, {2.0, 0.5, 0.0, 0.9, 0.0}};
    const auto pts = renormalize(raw);
    CHECK(pts[0].v_norm == Approx(0.75));
    CHECK(pts[0].std_error == Approx(0.75 * std::hypot(0.01 / 0.6, 0.02 / 0.8)));
    CHECK(pts[1].std_error == 0.0);
    raw[1].v_laser = 0.04;
    CHECK_THROWS_AS(renormalize(raw), AnalysisError);
}

TEST_CASE("chromatic correction") {
    const auto m = instrument::InstrumentModel::for_grating(1800);
    CHECK(chromatic_correction(m, 880.0, 880.0, 2.0) == Approx(1.0).epsilon(1e-15));
    const double k = chromatic_correction(m, 788.0, 880.41, 4.0);
    const double pl = physics::fringe_spacing(788.0, 4.0), ps = physics::fringe_spacing(880.41, 4.0);
    const double expect = instrument::gaussian_visibility_factor(0.06, pl) * instrument::pixel_visibility_factor(0.025, pl) /
                          (instrument::gaussian_visibility_factor(0.06, ps) * instrument::pixel_visibility_factor(0.025, ps));
    CHECK(k == Approx(expect).epsilon(1e-14));
    CHECK(k < 1.0);
}

TEST_CASE("reconcile time and frequency domain linewidths") {
    DecayFitResult d;
    d.gamma = 1.0 / 6.8;
    LorentzianFit line;
    line.fwhm = 1.95;
    const auto r = reconcile(d, line);
    CHECK(r.linewidth_time_domain == Approx(1.56).epsilon(0.01 / 1.56));
    CHECK(r.ratio == Approx(0.80).epsilon(0.01 / 0.8));
    CHECK(r.agree);

    line.fwhm = physics::linewidth_from_gamma(d.gamma);
    CHECK(reconcile(d, line).ratio == Approx(1.0).epsilon(1e-14));

    d.gamma = 1.0 / 10.5;
    line.fwhm = 1.01;
    CHECK(reconcile(d, line).ratio == Approx(1.00).epsilon(0.005));

    line.fwhm = 3.0;
    CHECK_FALSE(reconcile(d, line).agree);
}

TEST_CASE("visibility extraction on exact fringes") {
    for (double v : {0.0, 0.2, 0.55, 1.0}) {
        for (double tau : {0.39, 1.0, 4.0}) {
            const auto e = extract_visibility(synthetic_pair(tau, v, 0.7), tau);
            INFO("v = " << v << ", tau = " << tau);
            CHECK(e.v == Approx(v).epsilon(1e-3));
            if (v > 0) CHECK(e.sideband_delay == Approx(tau).epsilon(1e-3));
        }
    }
}

TEST_CASE("Fourier and direct-fit extractors agree") {
    auto model = instrument::InstrumentModel::for_grating(1800);
    VisibilityOptions direct;
    direct.method = VisibilityMethod::DirectFit;
    for (double tau : {0.5, 2.0, 4.0, 8.0}) {
        for (double phi : {0.0, 1.3}) {
            const Spectrum s = synthetic_pair(tau, std::exp(-tau / 6.8), phi);
            // Noise free.
            model.noise = instrument::NoiseModel::Off;
            auto binned = instrument::pixel_bin(s, model, 1.0);
            auto counts = instrument::apply_counting(binned, model);
            const auto f0 = extract_visibility(counts, tau);
            const auto d0 = extract_visibility(counts, tau, direct);
            INFO("tau = " << tau << ", phi = " << phi);
            CHECK(std::abs(f0.v - d0.v) <= 1e-3);
            // Photon counting at ~1e3 peak counts.
            model.noise = instrument::NoiseModel::Poisson;
            binned.exposure = 1000.0 / (model.efficiency * *std::max_element(binned.counts.begin(), binned.counts.end()));
            counts = instrument::apply_counting(binned, model, static_cast<std::uint64_t>(tau * 10 + phi * 100));
            const auto f = extract_visibility(counts, tau);
            const auto d = extract_visibility(counts, tau, direct);
            CHECK(f.std_error > 0.0);
            CHECK(std::abs(f.v - d.v) <= std::max(1e-3, 2.0 * std::hypot(f.std_error, d.std_error)));
        }
    }
}

TEST_CASE("visibility extraction failures") {
    const Spectrum s = synthetic_pair(1.0, 0.5, 0.0);
    CHECK_THROWS_AS(extract_visibility(s, 0.0), AnalysisError);
    const Spectrum zero(Axis::Wavelength, {1.0, 2.0, 3.0, 4.0}, {0.0, 0.0, 0.0, 0.0});
    CHECK_THROWS_AS(extract_visibility(zero, 1.0), AnalysisError);
    // Fringes far finer than the sampling.
    CHECK_THROWS_AS(extract_visibility(s, 200.0), AnalysisError);
    // Counting noise without fringes: no sideband above the floor.
    auto model = instrument::InstrumentModel::for_grating(1800);
    auto b = instrument::pixel_bin(synthetic_pair(2.0, 0.0, 0.0), model, 1.0);
    b.exposure = 500.0 / (model.efficiency * *std::max_element(b.counts.begin(), b.counts.end()));
    CHECK_THROWS_AS(extract_visibility(instrument::apply_counting(b, model, 1), 2.0), AnalysisError);
    CHECK(parse_method("direct_fit") == VisibilityMethod::DirectFit);
    CHECK_THROWS_AS(parse_method("fft"), DomainError);
}
