// Acceptance runner: one line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <unistd.h>

#include "oracles.hpp"
#include "tcups/analysis.hpp"
#include "tcups/app/commands.hpp"
#include "tcups/app/config.hpp"
#include "tcups/classical_model.hpp"
#include "tcups/instrument.hpp"
#include "tcups/io.hpp"
#include "tcups/physics.hpp"

using namespace tcups;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

int failures = 0;

void report(int id, bool pass, const std::string& what) {
    std::printf("[%s] %d %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    failures += !pass;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("tcups_accept_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void guarded(int id, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, false, std::string("threw: ") + e.what());
    }
}

// Closed-loop recovery with the default configuration.
void criterion1() {
    const fs::path dir = scratch("c1");
    app::RunConfig c = app::parse_config("{}");
    c.output_dir = dir;
    const auto t0 = std::chrono::steady_clock::now();
    app::cmd_simulate(c, 1);
    const auto r = app::cmd_analyze(dir, {}).report;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    double peak = 0.0;
    for (std::size_t i = 0; i < c.excitation.delays.size(); ++i) {
        const auto s = io::read_counts_csv(dir / app::spectrum_file_name(c.excitation.delays[i], true));
        peak = std::max(peak, *std::max_element(s.counts.begin(), s.counts.end()));
    }
    const double life = r["lifetime_ps"].get<double>(), se = r["lifetime_stderr_ps"].get<double>();
    const bool ok = std::abs(life - 6.8) <= 0.9 && secs < 60.0 && c.excitation.delays.size() >= 8 &&
                    c.shots == 10000 && peak >= 300.0 && peak <= 3000.0;
    report(1, ok, fmt("lifetime %.3f +- %.3f ps (target 6.8 +- 0.9), %zu delays, %zu shots, Stokes peak %.0f counts, %.2f s single core",
                      life, se, c.excitation.delays.size(), c.shots, peak, secs));
    fs::remove_all(dir);
}

Spectrum lorentz_line(double center, double fwhm, double amp, double offset) {
    std::vector<double> x, y;
    for (int i = 0; i <= 1200; ++i) {
        x.push_back(center - 30.0 + 0.05 * i);
        y.push_back(analysis::models::lorentzian(x.back(), Eigen::Vector4d(center, fwhm, amp, offset)));
    }
    return Spectrum(Axis::Wavenumber, x, y);
}

void criterion2() {
    const double gamma = 1.0 / 6.8;
    const double dnu = physics::linewidth_from_gamma(gamma);
    analysis::DecayFitResult d;
    d.gamma = gamma;
    const double fwhm = physics::linewidth_from_gamma(gamma);
    const auto rec = analysis::reconcile(d, analysis::fit_lorentzian(lorentz_line(1332.0, fwhm, 800.0, 10.0)));
    const bool ok = std::abs(dnu - 1.56) <= 0.05 && std::abs(rec.ratio - 1.0) <= 0.02;
    report(2, ok, fmt("linewidth %.4f cm^-1 (1.56 +- 0.05), reconcile ratio %.6f (1 +- 0.02)", dnu, rec.ratio));
}

void criterion3() {
    app::RunConfig c = app::parse_config(R"({"excitation": {"delays_ps": [0.39]}})");
    const auto ch = app::simulate_delay(c, 0);
    const auto est = analysis::extract_visibility(ch.stokes, 0.39);
    const double lc = analysis::centroid_wavelength(ch.stokes);
    const double period = lc * lc / (physics::kC_nm_per_ps * est.sideband_delay);
    const double pixel = ch.stokes.pixel_width();
    const bool ok = std::abs(period - oracle::kFringe039) <= pixel;
    report(3, ok, fmt("fringe period %.4f nm at 0.39 ps vs %.4f nm, tolerance one pixel %.4f nm", period,
                      oracle::kFringe039, pixel));
}

void criterion4() {
    const auto r = app::cmd_quantum_check(app::parse_config("{}"), 0);
    const double r2 = r["r_squared"].get<double>(), ratio = r["rate_ratio"].get<double>();
    const bool all3 = r["all_within_3_stderr"].get<bool>();
    double worst = 0.0;
    for (const auto& p : r["points"]) worst = std::max(worst, p["deviation_sigma"].get<double>());
    const bool ok = r2 > 0.99 && all3 && std::abs(ratio - 2.0) <= 0.1;
    report(4, ok, fmt("R^2 %.5f (> 0.99), %zu points, worst deviation %.2f sigma (<= 3), rate ratio %.4f (2 +- 5%%)", r2,
                      r["points"].size(), worst, ratio));
}

void criterion5() {
    const double n = physics::thermal_population(1332.0, 300.0);
    const double rounded = std::round(n * 1e4) / 1e4;
    report(5, rounded == 0.0017, fmt("thermal population %.6g -> %.4f (0.0017)", n, rounded));
}

void criterion6() {
    const auto r = app::cmd_power_scan(app::parse_config("{}"), 0);
    const double slope = r["loglog_slope"].get<double>();
    const double lo = r["points"].front()["yield_measured"].get<double>();
    const double hi = r["points"].back()["yield_measured"].get<double>();
    const auto off = app::cmd_power_scan(app::parse_config(R"({"instrument": {"noise": "off"}})"), 0);
    const double spread = off["visibility_spread"].get<double>();
    const bool ok = std::abs(slope - 1.0) <= 0.02 && std::abs(lo / 0.004 - 1.0) <= 0.2 && std::abs(hi / 1.3 - 1.0) <= 0.2 &&
                    spread <= 1e-6;
    report(6, ok, fmt("slope %.4f (1 +- 0.02), yields %.5f / %.4f photons per pulse (0.004 / 1.3 +- 20%%), visibility spread %.2g (<= 1e-6)",
                      slope, lo, hi, spread));
}

Spectrum cosine(double lo, double hi, double pitch, double period, double v = 1.0) {
    const auto n = static_cast<std::size_t>(std::llround((hi - lo) / pitch)) + 1;
    const Grid g{Axis::Wavelength, lo, pitch, n};
    std::vector<double> y;
    for (double x : g.values()) y.push_back(1.0 + v * std::cos(2 * kPi * x / period));
    return Spectrum(g, y);
}

double contrast(std::span<const double> x, std::span<const double> y, double period, double lo, double hi) {
    Eigen::MatrixXd a(0, 3);
    std::vector<double> rows, rhs;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < lo || x[i] > hi) continue;
        rows.insert(rows.end(), {1.0, std::cos(2 * kPi * x[i] / period), std::sin(2 * kPi * x[i] / period)});
        rhs.push_back(y[i]);
    }
    a = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>>(rows.data(), static_cast<Eigen::Index>(rhs.size()), 3);
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
    // Minimum-norm solve: at w = P/2 one quadrature is unobservable.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a.rows(), 3);
    cod.setThreshold(1e-9);
    cod.compute(a);
    const Eigen::Vector3d p = cod.solve(b);
    return std::hypot(p[1], p[2]) / p[0];
}

void criterion7() {
    instrument::InstrumentModel m;
    m.noise = instrument::NoiseModel::Off;

    m.resolution_fwhm = 0.0;
    m.pixel_width = 0.5;
    const auto binned = instrument::pixel_bin(cosine(-0.25, 60.0, 0.00025, 1.0), m, 1.0, 1.0);
    const double sinc = contrast(binned.bins, binned.counts, 1.0, 5.0, 55.0);

    m.resolution_fwhm = 0.3;
    const Spectrum conv = instrument::convolve_response(cosine(0.0, 40.0, 0.002, 1.0), m);
    const double gauss = contrast(conv.grid(), conv.intensity(), 1.0, 5.0, 35.0);
    const double gauss_ref = instrument::gaussian_visibility_factor(0.3, 1.0);

    // Stokes-like channel with source visibility exp(-Gamma tau) and a laser
    // channel at the same wavelength, both through the default instrument.
    const auto inst = instrument::InstrumentModel::for_grating(1800);
    auto noiseless = inst;
    noiseless.noise = instrument::NoiseModel::Off;
    const double gamma = 1.0 / 6.8;
    double worst = 0.0;
    for (double tau = 0.4; tau < 4.01; tau += 0.4) {
        classical::PulsePair p;
        p.center_wavelength = 880.4;
        p.delay = tau;
        const double fwhm_nm = p.center_wavelength * p.center_wavelength * p.bandwidth() / physics::kC_nm_per_ps;
        const Grid g = Grid::spanning(Axis::Wavelength, p.center_wavelength - 3 * fwhm_nm, p.center_wavelength + 3 * fwhm_nm,
                                      static_cast<std::size_t>(6 * fwhm_nm / (inst.pixel_width / 8)) + 1);
        const double period = physics::fringe_spacing(p.center_wavelength, tau);
        auto channel = [&](double v) {
            const auto s = classical::fringe_spectrum(p, g, {v, 0.0});
            return analysis::extract_visibility(instrument::pixel_bin(instrument::convolve_response(s, noiseless), noiseless, 1.0, period), tau);
        };
        const auto vs = channel(std::exp(-gamma * tau));
        const auto vl = channel(1.0);
        const analysis::RawVisibility raw{tau, vs.v, 0.0, vl.v, 0.0};
        const auto pts = analysis::renormalize(std::span(&raw, 1));
        worst = std::max(worst, std::abs(pts[0].v_norm - std::exp(-gamma * tau)));
    }
    const bool ok = std::abs(sinc - oracle::kSincHalf) <= 1e-6 && std::abs(gauss - gauss_ref) <= 1e-6 && worst <= 1e-2;
    report(7, ok, fmt("sinc factor %.8f vs %.8f, Gaussian factor %.8f vs %.8f (1e-6), renormalized visibility max error %.2g (1e-2)",
                      sinc, oracle::kSincHalf, gauss, gauss_ref, worst));
}

template <int N>
double jacobian_error(const std::function<double(double, const Eigen::Matrix<double, N, 1>&)>& f,
                      const std::function<Eigen::Matrix<double, N, 1>(double, const Eigen::Matrix<double, N, 1>&)>& g,
                      const std::vector<double>& xs, const Eigen::Matrix<double, N, 1>& p) {
    double worst = 0.0;
    for (double x : xs) {
        const auto a = g(x, p);
        for (int k = 0; k < N; ++k) {
            const double h = 1e-6 * std::max(1.0, std::abs(p[k]));
            auto at = [&](double d) {
                auto q = p;
                q[k] += d;
                return f(x, q);
            };
            const double num = (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
            const double scale = std::max(std::abs(a[k]), 1e-3 * a.cwiseAbs().maxCoeff());
            worst = std::max(worst, std::abs(a[k] - num) / scale);
        }
    }
    return worst;
}

void criterion8() {
    std::vector<double> taus;
    for (double t = 0.4; t < 4.01; t += 0.4) taus.push_back(t);
    std::vector<double> xs;
    for (double x = 1320.0; x <= 1344.0; x += 0.37) xs.push_back(x);
    const double jd = jacobian_error<2>(analysis::models::decay, analysis::models::decay_gradient, taus,
                                        Eigen::Vector2d(1.0, 1.0 / 6.8));
    const double jl = jacobian_error<4>(analysis::models::lorentzian, analysis::models::lorentzian_gradient, xs,
                                        Eigen::Vector4d(1332.0, 1.95, 100.0, 3.0));

    const double gamma = 1.0 / 6.8, v0 = 0.97;
    std::mt19937_64 rng(20240601);
    int in2 = 0;
    for (int t = 0; t < 200; ++t) {
        std::vector<analysis::VisibilityPoint> pts;
        for (double tau : taus) {
            analysis::VisibilityPoint p;
            p.delay = tau;
            p.std_error = 0.004 + 0.002 * tau;
            p.v_norm = v0 * std::exp(-gamma * tau) + std::normal_distribution<double>(0.0, p.std_error)(rng);
            pts.push_back(p);
        }
        const auto r = analysis::fit_decay(pts);
        in2 += std::abs(r.gamma - gamma) <= 2.0 * r.gamma_std_error;
    }
    const double fwhm = analysis::fit_lorentzian(lorentz_line(1332.0, 1.95, 1000.0, 20.0)).fwhm;
    const double rt = std::abs(fwhm - 1.95) / 1.95;
    const bool ok = jd <= 1e-6 && jl <= 1e-6 && in2 >= 190 && rt <= 1e-6;
    report(8, ok, fmt("Jacobian rel. error decay %.2g, Lorentzian %.2g (1e-6); 2-sigma coverage %d/200 (>= 190); Lorentzian round trip %.2g (1e-6)",
                      jd, jl, in2, rt));
}

void criterion9() {
    const fs::path a = scratch("c9a"), b = scratch("c9b");
    app::RunConfig c = app::parse_config("{}");
    c.output_dir = a;
    const auto ra = app::cmd_simulate(c, 1);
    c.output_dir = b;
    app::cmd_simulate(c, 4);
    std::size_t same = 0;
    for (const auto& f : ra.files) same += io::read_file(f) == io::read_file(b / f.filename());
    report(9, same == ra.files.size(), fmt("%zu/%zu CSVs byte-identical between 1 and 4 workers", same, ra.files.size()));
    fs::remove_all(a);
    fs::remove_all(b);
}

}  // namespace

int main() {
    guarded(1, criterion1);
    guarded(2, criterion2);
    guarded(3, criterion3);
    guarded(4, criterion4);
    guarded(5, criterion5);
    guarded(6, criterion6);
    guarded(7, criterion7);
    guarded(8, criterion8);
    guarded(9, criterion9);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
