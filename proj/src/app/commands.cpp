#include "tcups/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <mutex>
#include <regex>
#include <system_error>

#include "tcups/app/svg.hpp"
#include "tcups/classical_model.hpp"
#include "tcups/errors.hpp"
#include "tcups/io.hpp"
#include "tcups/parallel.hpp"
#include "tcups/physics.hpp"
#include "tcups/quantum_model.hpp"
#include "tcups/rng.hpp"
#include "tcups/stats.hpp"

namespace tcups::app {

namespace fs = std::filesystem;

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

// Seed for an independent ensemble tied to (run seed, purpose, index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
    return splitmix64(splitmix64(splitmix64(seed) ^ purpose) ^ index);
}

constexpr std::uint64_t kDelayEnsemble = 0x64656c6179ULL;
constexpr std::uint64_t kPowerEnsemble = 0x706f776572ULL;
constexpr std::uint64_t kBootstrap = 0x626f6f74ULL;

// Window of +-3 spectral FWHM around the pulse centre, sampled at 1/8 pixel.
Grid channel_grid(const classical::PulsePair& pulse, double pixel_width) {
    const double lam = pulse.center_wavelength;
    const double fwhm_nm = lam * lam * pulse.bandwidth() / physics::kC_nm_per_ps;
    const double pitch = pixel_width / 8.0;
    const auto count = static_cast<std::size_t>(std::ceil(6.0 * fwhm_nm / pitch)) + 1;
    return Grid{Axis::Wavelength, lam - 3.0 * fwhm_nm, pitch, count};
}

// Scales a pair spectrum so that each pulse of the pair carries `photons`.
Spectrum per_pulse_photons(const Spectrum& s, const classical::PulsePair& pulse, const Grid& grid,
                           double photons) {
    const double single = classical::single_pulse_spectrum(pulse, grid).integral();
    return s.scaled(photons / single);
}

instrument::CountsSpectrum detect(const Spectrum& s, const instrument::InstrumentModel& model, double exposure,
                                  double fringe_period, std::uint64_t stream) {
    const auto blurred = instrument::convolve_response(s, model);
    const auto binned = instrument::pixel_bin(blurred, model, exposure, fringe_period);
    return instrument::apply_counting(binned, model, stream);
}

instrument::InstrumentModel seeded_model(const RunConfig& c) {
    auto m = c.instrument.model;
    m.seed = c.seed;
    return m;
}

Json nullable(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

// ---- simulate ---------------------------------------------------------------

std::string spectrum_file_name(double delay, bool stokes) {
    return "tau_" + io::format_double(delay) + "ps_" + (stokes ? "stokes" : "laser") + ".csv";
}

std::optional<std::pair<double, bool>> parse_spectrum_file_name(const std::string& name) {
    static const std::regex re(R"(^tau_([0-9eE+.\-]+)ps_(stokes|laser)\.csv$)");
    std::smatch m;
    if (!std::regex_match(name, m, re)) return std::nullopt;
    try {
        const double d = io::parse_double(m[1].str());
        return std::make_pair(d, m[2].str() == "stokes");
    } catch (const ValidationError&) {
        return std::nullopt;
    }
}

DelayChannels simulate_delay(const RunConfig& c, std::size_t index) {
    const double delay = c.excitation.delays.at(index);
    const auto model = seeded_model(c);
    DelayChannels out;
    out.delay = delay;

    classical::PulsePair laser_pulse;
    laser_pulse.center_wavelength = c.excitation.pump_wavelength;
    laser_pulse.duration_fwhm = c.excitation.duration_fwhm;
    laser_pulse.delay = delay;
    const Grid lg = channel_grid(laser_pulse, model.pixel_width);
    // Pulse pair from a stable interferometer: no phase jitter.
    const Spectrum laser = per_pulse_photons(classical::fringe_spectrum(laser_pulse, lg, {1.0, 0.0}, c.shots),
                                             laser_pulse, lg, c.excitation.laser_photons);
    out.laser = detect(laser, model, c.instrument.exposure,
                       physics::fringe_spacing(laser_pulse.center_wavelength, delay), 2 * index);

    classical::PulsePair stokes_pulse = laser_pulse;
    stokes_pulse.center_wavelength = physics::stokes_wavelength(c.excitation.pump_wavelength, c.material.raman_shift);
    const Grid sg = channel_grid(stokes_pulse, model.pixel_width);
    classical::ExcitationConfig ex;
    ex.pump_wavelength = c.excitation.pump_wavelength;
    ex.duration_fwhm = c.excitation.duration_fwhm;
    ex.pulse_energy = c.excitation.delay_scan_energy();
    ex.delay = delay;
    classical::ShotEnsemble ens;
    ens.shots = c.shots;
    ens.seed = derive_seed(c.seed, kDelayEnsemble, index);
    ens.phase_model = c.phase_model;
    ens.workers = 1;
    const double photons = physics::stokes_yield(ex.pulse_energy, c.excitation.yield_calibration);
    const Spectrum stokes =
        per_pulse_photons(classical::averaged_spectrum(ex, c.material, ens, sg), stokes_pulse, sg, photons);
    out.stokes = detect(stokes, model, c.instrument.exposure,
                        physics::fringe_spacing(stokes_pulse.center_wavelength, delay), 2 * index + 1);
    return out;
}

SimulateResult cmd_simulate(const RunConfig& config, unsigned workers) {
    config.validate();
    const std::string started = utc_timestamp();
    SimulateResult result;
    result.directory = config.output_dir;
    std::error_code ec;
    fs::create_directories(result.directory, ec);
    if (ec || !fs::is_directory(result.directory)) {
        throw IoError("cannot create output directory " + result.directory.string());
    }

    const std::size_t n = config.excitation.delays.size();
    std::vector<std::pair<fs::path, fs::path>> files(n);
    parallel_for(n, resolve_workers(workers), [&](std::size_t i) {
        const DelayChannels ch = simulate_delay(config, i);
        const fs::path laser = result.directory / spectrum_file_name(ch.delay, false);
        const fs::path stokes = result.directory / spectrum_file_name(ch.delay, true);
        io::write_counts_csv(laser, ch.laser);
        io::write_counts_csv(stokes, ch.stokes);
        files[i] = {laser, stokes};
    });

    Json list = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
        result.files.push_back(files[i].first);
        result.files.push_back(files[i].second);
        list.push_back({{"delay_ps", config.excitation.delays[i]},
                        {"laser", files[i].first.filename().string()},
                        {"stokes", files[i].second.filename().string()}});
    }
    result.manifest = {{"tool", kToolName},
                       {"version", kToolVersion},
                       {"config_hash", config_hash(config)},
                       {"seed", config.seed},
                       {"started_utc", started},
                       {"finished_utc", utc_timestamp()},
                       {"config", to_json(config)},
                       {"files", list}};
    io::write_file_atomic(result.directory / "manifest.json", result.manifest.dump(2) + "\n");
    return result;
}

// ---- analyze ----------------------------------------------------------------

namespace {

struct DelayFiles {
    fs::path laser;
    fs::path stokes;
};

struct Extraction {
    bool ok = false;
    std::string error;
    analysis::RawVisibility raw;
    analysis::VisibilityPoint point;
    double correction = 1.0;
    instrument::CountsSpectrum stokes;
};

std::string waterfall_svg(const std::vector<std::pair<double, const instrument::CountsSpectrum*>>& spectra,
                          const std::vector<std::string>& provenance) {
    std::vector<svg::Series> series;
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    for (std::size_t k = 0; k < spectra.size(); ++k) {
        const auto& s = *spectra[k].second;
        const double peak = *std::max_element(s.counts.begin(), s.counts.end());
        svg::Series line;
        line.label = "tau = " + io::format_double(spectra[k].first) + " ps";
        line.color = palette[k % 10];
        line.x = s.bins;
        for (double c : s.counts) line.y.push_back((peak > 0 ? c / peak : 0.0) + 0.8 * static_cast<double>(k));
        series.push_back(std::move(line));
    }
    svg::Chart chart;
    chart.title = "Stokes pair spectra";
    chart.x_label = "wavelength (nm)";
    chart.y_label = "counts / peak, offset by delay";
    chart.provenance = provenance;
    return svg::render(chart, series);
}

std::string visibility_svg(const std::vector<analysis::VisibilityPoint>& pts, const analysis::DecayFitResult& fit,
                           const std::vector<std::string>& provenance) {
    svg::Series data;
    data.label = "normalised visibility";
    data.markers = true;
    for (const auto& p : pts) {
        data.x.push_back(p.delay);
        data.y.push_back(p.v_norm);
        data.y_error.push_back(p.std_error);
    }
    svg::Series curve;
    curve.label = "v0 exp(-gamma tau), gamma = " + io::format_double(fit.gamma) + " /ps";
    curve.color = "#d62728";
    const double tmax = pts.empty() ? 1.0 : pts.back().delay * 1.05;
    for (int k = 0; k <= 200; ++k) {
        const double t = tmax * k / 200.0;
        curve.x.push_back(t);
        curve.y.push_back(fit.v0 * std::exp(-fit.gamma * t));
    }
    svg::Chart chart;
    chart.title = "Fringe visibility vs delay";
    chart.x_label = "delay (ps)";
    chart.y_label = "visibility";
    chart.provenance = provenance;
    return svg::render(chart, {data, curve});
}

}  // namespace

AnalyzeResult cmd_analyze(const fs::path& dir, const AnalyzeOptions& options) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());

    std::map<double, DelayFiles> pairs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const auto parsed = parse_spectrum_file_name(entry.path().filename().string());
        if (!parsed) continue;
        auto& f = pairs[parsed->first];
        (parsed->second ? f.stokes : f.laser) = entry.path();
    }
    if (pairs.empty()) {
        throw AnalysisError("missing laser/Stokes pairs: no tau_<delay>ps_{laser,stokes}.csv files in " + dir.string());
    }
    for (const auto& [delay, f] : pairs) {
        if (f.laser.empty() || f.stokes.empty()) {
            throw AnalysisError("missing " + std::string(f.laser.empty() ? "laser" : "Stokes") +
                                " spectrum for delay " + io::format_double(delay) + " ps");
        }
    }

    physics::MaterialParams material;
    std::optional<instrument::InstrumentModel> instrument_model;
    std::uint64_t seed = options.seed.value_or(1);
    bool seed_known = options.seed.has_value();
    std::string manifest_hash;
    if (const fs::path mpath = dir / "manifest.json"; fs::exists(mpath)) {
        try {
            const auto m = nlohmann::json::parse(io::read_file(mpath));
            if (!options.seed && m.contains("seed")) {
                seed = m.at("seed").get<std::uint64_t>();
                seed_known = true;
            }
            if (m.contains("config_hash")) manifest_hash = m.at("config_hash").get<std::string>();
            if (m.contains("config")) {
                const RunConfig c = parse_config(m.at("config").dump(), mpath.string());
                material = c.material;
                instrument_model = c.instrument.model;
            }
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(mpath.string() + ": " + e.what());
        }
    }

    std::vector<double> delays;
    std::vector<DelayFiles> files;
    for (const auto& [d, f] : pairs) {
        delays.push_back(d);
        files.push_back(f);
    }
    const std::size_t n = delays.size();

    std::vector<instrument::CountsSpectrum> laser(n), stokes(n);
    for (std::size_t i = 0; i < n; ++i) {
        laser[i] = io::read_counts_csv(files[i].laser);
        stokes[i] = io::read_counts_csv(files[i].stokes);
    }

    const bool apply_correction = options.chromatic_correction && instrument_model.has_value();
    std::vector<Extraction> ex(n);
    parallel_for(n, resolve_workers(options.workers), [&](std::size_t i) {
        analysis::VisibilityOptions vo;
        vo.method = options.method;
        vo.bootstrap_samples = options.bootstrap_samples;
        try {
            vo.seed = derive_seed(seed, kBootstrap, 2 * i);
            const auto vl = analysis::extract_visibility(laser[i], delays[i], vo);
            vo.seed = derive_seed(seed, kBootstrap, 2 * i + 1);
            const auto vs = analysis::extract_visibility(stokes[i], delays[i], vo);
            ex[i].raw = {delays[i], vs.v, vs.std_error, vl.v, vl.std_error};
            ex[i].point = analysis::renormalize(std::span<const analysis::RawVisibility>(&ex[i].raw, 1)).front();
            if (apply_correction) {
                const double k = analysis::chromatic_correction(*instrument_model,
                                                                analysis::centroid_wavelength(laser[i]),
                                                                analysis::centroid_wavelength(stokes[i]), delays[i]);
                ex[i].point.v_norm *= k;
                ex[i].point.std_error *= k;
                ex[i].correction = k;
            }
            ex[i].ok = true;
        } catch (const AnalysisError& e) {
            ex[i].error = e.what();
        } catch (const DomainError& e) {
            ex[i].error = e.what();
        }
    });

    std::vector<analysis::VisibilityPoint> points;
    Json point_list = Json::array();
    Json failures = Json::array();
    for (std::size_t i = 0; i < n; ++i) {
        if (!ex[i].ok) {
            failures.push_back({{"delay_ps", delays[i]}, {"error", ex[i].error}});
            continue;
        }
        const auto& p = ex[i].point;
        points.push_back(p);
        point_list.push_back({{"delay_ps", p.delay},
                              {"v_stokes", p.v_stokes},
                              {"v_laser", p.v_laser},
                              {"v_norm", p.v_norm},
                              {"stderr", p.std_error},
                              {"instrument_correction", ex[i].correction}});
    }

    analysis::DecayFitOptions fo;
    fo.fix_amplitude = options.fix_amplitude;
    analysis::DecayFitResult fit;
    try {
        fit = analysis::fit_decay(points, fo);
    } catch (const AnalysisError& e) {
        std::string msg = e.what();
        if (!failures.empty()) msg += " (" + std::to_string(failures.size()) + " delay(s) failed extraction)";
        throw AnalysisError(msg);
    }

    const auto lifetime = fit.lifetime();
    const auto linewidth = fit.linewidth();
    std::optional<double> lifetime_err, linewidth_err, q;
    if (lifetime) lifetime_err = fit.gamma_std_error / (fit.gamma * fit.gamma);
    if (linewidth) {
        linewidth_err = physics::linewidth_from_gamma(fit.gamma_std_error);
        q = physics::q_factor(material.raman_shift, fit.gamma);
    }

    AnalyzeResult result;
    Json& r = result.report;
    r["tool"] = kToolName;
    r["version"] = kToolVersion;
    r["method"] = analysis::method_name(options.method);
    r["seed"] = seed_known ? Json(seed) : Json(nullptr);
    r["gamma_ps_inv"] = fit.gamma;
    r["gamma_stderr_ps_inv"] = fit.gamma_std_error;
    r["lifetime_ps"] = nullable(lifetime);
    r["lifetime_stderr_ps"] = nullable(lifetime_err);
    r["linewidth_cm_inv"] = nullable(linewidth);
    r["linewidth_stderr_cm_inv"] = nullable(linewidth_err);
    r["q_factor"] = nullable(q);
    r["raman_shift_cm_inv"] = material.raman_shift;
    r["chromatic_correction"] = apply_correction;
    r["fit"] = {{"v0", fit.v0},
                {"v0_stderr", fit.v0_std_error},
                {"v0_fixed", options.fix_amplitude},
                {"weighted", fit.weighted},
                {"at_boundary", fit.at_boundary},
                {"iterations", fit.iterations},
                {"residual_rms", fit.residual_rms},
                {"points_used", fit.tau_points}};
    r["points"] = point_list;
    r["failures"] = failures;

    if (options.raman_spectrum) {
        const Spectrum line = io::read_spectrum_csv(*options.raman_spectrum);
        if (line.axis() != Axis::Wavenumber) {
            throw ValidationError(options.raman_spectrum->string() + ": Raman line must be on a wavenumber_cm axis");
        }
        const auto lf = analysis::fit_lorentzian(line);
        Json rec = {{"line_center_cm_inv", lf.center},
                    {"line_fwhm_cm_inv", lf.fwhm},
                    {"line_fwhm_stderr_cm_inv", lf.fwhm_error}};
        if (!fit.at_boundary) {
            const auto rc = analysis::reconcile(fit, lf);
            rec["linewidth_time_domain_cm_inv"] = rc.linewidth_time_domain;
            rec["ratio"] = rc.ratio;
            rec["agree"] = rc.agree;
        } else {
            rec["linewidth_time_domain_cm_inv"] = nullptr;
            rec["ratio"] = nullptr;
            rec["agree"] = nullptr;
        }
        r["reconciliation"] = rec;
    }

    const fs::path out = options.out_dir.value_or(dir);
    const fs::path report_path = out / "report.json";
    io::write_file_atomic(report_path, r.dump(2) + "\n");
    result.written.push_back(report_path);

    if (options.plot) {
        std::vector<std::string> prov{
            std::string(kToolName) + " " + kToolVersion + " analyze",
            "source directory: " + fs::absolute(dir).string(),
            "method: " + std::string(analysis::method_name(options.method)),
            "config hash: " + (manifest_hash.empty() ? std::string("unknown") : manifest_hash),
            "generated: " + utc_timestamp()};
        std::vector<std::pair<double, const instrument::CountsSpectrum*>> spectra;
        for (std::size_t i = 0; i < n; ++i) spectra.emplace_back(delays[i], &stokes[i]);
        io::write_file_atomic(out / "waterfall.svg", waterfall_svg(spectra, prov));
        io::write_file_atomic(out / "visibility.svg", visibility_svg(points, fit, prov));
        result.written.push_back(out / "waterfall.svg");
        result.written.push_back(out / "visibility.svg");
    }
    return result;
}

// ---- quantum-check ------------------------------------------------------------

Json cmd_quantum_check(const RunConfig& config, unsigned workers) {
    config.validate();
    auto p = config.langevin();
    p.workers = workers;
    const auto delays = config.quantum_delays();

    std::vector<quantum::CorrelationResult> sim, pert;
    for (double d : delays) {
        sim.push_back(quantum::integrate_langevin(p, d));
        pert.push_back(quantum::perturbative_ops(p, d));
    }

    const double c0 = std::abs(sim.front().corr);
    const double p0 = std::abs(pert.front().corr);
    const bool ratio_defined = c0 > 0.0 && p0 > 0.0 && delays.front() == 0.0;

    Json pts = Json::array();
    bool all_within = true;
    std::vector<double> ratios, expected;
    std::vector<std::string> warnings = p.regime_warnings();
    for (std::size_t i = 0; i < delays.size(); ++i) {
        const auto& s = sim[i];
        const auto& q = pert[i];
        const double diff = std::abs(s.corr - q.corr);
        const bool within = diff <= 3.0 * s.std_error;
        all_within = all_within && within;
        for (const auto& w : s.warnings) {
            if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
        }
        Json pt = {{"delay_ps", delays[i]},
                   {"gamma_tau", p.gamma * delays[i]},
                   {"corr_re", s.corr.real()},
                   {"corr_im", s.corr.imag()},
                   {"corr_stderr", s.std_error},
                   {"perturbative_corr_re", q.corr.real()},
                   {"perturbative_corr_im", q.corr.imag()},
                   {"n1", s.n1},
                   {"n2", s.n2},
                   {"perturbative_n1", q.n1},
                   {"deviation_sigma", s.std_error > 0 ? Json(diff / s.std_error) : Json(nullptr)},
                   {"within_3_stderr", within}};
        if (ratio_defined) {
            const double ratio = std::abs(s.corr) / c0;
            const double model = std::exp(-p.gamma * delays[i]);
            ratios.push_back(ratio);
            expected.push_back(model);
            pt["ratio"] = ratio;
            pt["expected_ratio"] = model;
        } else {
            pt["ratio"] = nullptr;
            pt["expected_ratio"] = nullptr;
        }
        pts.push_back(pt);
    }

    Json report = {{"tool", kToolName},
                   {"version", kToolVersion},
                   {"seed", config.seed},
                   {"params",
                    {{"coupling_ps_inv", p.coupling},
                     {"pump_duration_ps", p.pump_duration},
                     {"gamma_ps_inv", p.gamma},
                     {"dt_ps", p.dt},
                     {"trajectories", p.trajectories},
                     {"thermal_population", p.thermal_population}}},
                   {"points", pts},
                   {"all_within_3_stderr", all_within}};

    const bool decays = ratio_defined && p.gamma > 0.0;
    report["r_squared"] = decays ? Json(stats::r_squared(ratios, expected)) : Json(nullptr);

    std::optional<double> corr_rate, amp_rate, pop_rate;
    if (decays) corr_rate = quantum::correlation_decay_rate(sim);
    if (p.gamma > 0.0) {
        auto free = p;
        free.coupling = 0.0;
        const auto trace = quantum::population_decay(free, 10.0, 2.0 / p.gamma);
        pop_rate = trace.fitted_rate;
        amp_rate = trace.amplitude_rate;
    }
    report["correlation_decay_rate_ps_inv"] = nullable(corr_rate);
    report["amplitude_decay_rate_ps_inv"] = nullable(amp_rate);
    report["population_decay_rate_ps_inv"] = nullable(pop_rate);
    report["rate_ratio"] = (amp_rate && pop_rate && *amp_rate > 0) ? Json(*pop_rate / *amp_rate) : Json(nullptr);
    report["warnings"] = warnings;
    return report;
}

// ---- power-scan ---------------------------------------------------------------

Json cmd_power_scan(const RunConfig& config, unsigned workers) {
    config.validate();
    const auto& energies = config.excitation.energies;
    const double lo = *std::min_element(energies.begin(), energies.end());
    const double hi = *std::max_element(energies.begin(), energies.end());
    if (energies.size() < 4 || hi / lo < 100.0) {
        throw ValidationError("power scan needs at least 4 energies spanning at least two decades (got " +
                              std::to_string(energies.size()) + " spanning a factor " + io::format_double(hi / lo) +
                              ")");
    }

    const auto model = seeded_model(config);
    const double exposure = config.instrument.exposure;
    const double delay = config.power_scan_delay;

    classical::PulsePair single;
    single.center_wavelength = physics::stokes_wavelength(config.excitation.pump_wavelength, config.material.raman_shift);
    single.duration_fwhm = config.excitation.duration_fwhm;
    const Grid grid = channel_grid(single, model.pixel_width);
    const Spectrum unit = classical::single_pulse_spectrum(single, grid);
    const double unit_integral = unit.integral();
    const double period = physics::fringe_spacing(single.center_wavelength, delay);

    struct Row {
        double energy = 0, model_yield = 0, measured = 0, counts = 0;
        std::optional<double> v, v_err;
        std::string error;
    };
    std::vector<Row> rows(energies.size());
    parallel_for(energies.size(), resolve_workers(workers), [&](std::size_t i) {
        Row& row = rows[i];
        row.energy = energies[i];
        row.model_yield = physics::stokes_yield(row.energy, config.excitation.yield_calibration);
        const auto counts = detect(unit.scaled(row.model_yield / unit_integral), model, exposure, 0.0, 4096 + 2 * i);
        row.counts = counts.total();
        row.measured = row.counts / (model.efficiency * exposure);

        classical::ExcitationConfig ex;
        ex.pump_wavelength = config.excitation.pump_wavelength;
        ex.duration_fwhm = config.excitation.duration_fwhm;
        ex.pulse_energy = row.energy;
        ex.delay = delay;
        classical::ShotEnsemble ens;
        ens.shots = config.shots;
        ens.seed = derive_seed(config.seed, kPowerEnsemble, 0);  // shared: only the energy varies
        ens.phase_model = config.phase_model;
        ens.workers = 1;
        classical::PulsePair pair = single;
        pair.delay = delay;
        const Spectrum s = per_pulse_photons(classical::averaged_spectrum(ex, config.material, ens, grid), pair, grid,
                                             row.model_yield);
        try {
            analysis::VisibilityOptions vo;
            vo.seed = derive_seed(config.seed, kBootstrap, 4096 + i);
            const auto v = analysis::extract_visibility(detect(s, model, exposure, period, 4096 + 2 * i + 1), delay, vo);
            row.v = v.v;
            row.v_err = v.std_error;
        } catch (const AnalysisError& e) {
            row.error = e.what();
        }
    });

    std::vector<double> lx, ly;
    Json pts = Json::array();
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    for (const auto& row : rows) {
        if (row.measured > 0) {
            lx.push_back(std::log(row.energy));
            ly.push_back(std::log(row.measured));
        }
        if (row.v) {
            vmin = std::min(vmin, *row.v);
            vmax = std::max(vmax, *row.v);
        }
        Json pt = {{"energy_pj", row.energy},
                   {"yield_model", row.model_yield},
                   {"yield_measured", row.measured},
                   {"counts_total", row.counts},
                   {"visibility", nullable(row.v)},
                   {"visibility_stderr", nullable(row.v_err)}};
        if (!row.error.empty()) pt["visibility_error"] = row.error;
        pts.push_back(pt);
    }
    if (lx.size() < 2) throw AnalysisError("fewer than two energies produced counts; cannot fit the power law");
    const auto line = stats::fit_line(lx, ly);

    return Json{{"tool", kToolName},
                {"version", kToolVersion},
                {"seed", config.seed},
                {"calibration_photons_per_pj", config.excitation.yield_calibration},
                {"efficiency", model.efficiency},
                {"exposure_pulses", exposure},
                {"noise", instrument::noise_model_name(model.noise)},
                {"delay_ps", delay},
                {"points", pts},
                {"loglog_slope", line.slope},
                {"loglog_slope_stderr", line.slope_error},
                {"loglog_intercept", line.intercept},
                {"loglog_r_squared", line.r_squared},
                {"visibility_spread", std::isfinite(vmin) ? Json(vmax - vmin) : Json(nullptr)}};
}

}  // namespace tcups::app
