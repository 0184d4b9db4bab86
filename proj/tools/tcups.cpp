#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tcups/app/commands.hpp"
#include "tcups/errors.hpp"
#include "tcups/io.hpp"

namespace fs = std::filesystem;
using namespace tcups;

namespace {

struct Common {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> shots;
    bool plot = false;
    bool json_only = false;
    unsigned jobs = 0;
};

void add_common(CLI::App* cmd, Common& c, bool with_config = true) {
    if (with_config) cmd->add_option("--config", c.config_path, "Run configuration (JSON)");
    cmd->add_option("--out", c.out, "Output directory");
    cmd->add_option("--seed", c.seed, "Master seed");
    cmd->add_option("--shots", c.shots, "Shots per ensemble (trajectories for quantum-check)");
    cmd->add_flag("--plot", c.plot, "Write SVG plots");
    cmd->add_flag("--json-only", c.json_only, "Print only the JSON report on stdout");
    cmd->add_option("--jobs", c.jobs, "Worker threads (0 = all cores); never changes results");
}

app::RunConfig resolve(const Common& c) {
    app::RunConfig cfg = c.config_path.empty() ? app::parse_config("{}", "defaults") : app::load_config(c.config_path);
    app::apply_environment(cfg);
    if (!c.out.empty()) cfg.output_dir = c.out;
    if (c.seed) cfg.seed = *c.seed;
    if (c.shots) {
        cfg.shots = *c.shots;
        cfg.quantum.trajectories = *c.shots;
    }
    cfg.validate();
    return cfg;
}

void emit(const app::Json& report, const fs::path& path, bool json_only, const std::string& summary) {
    if (!path.empty()) io::write_file_atomic(path, report.dump(2) + "\n");
    if (json_only) {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << summary;
        if (!path.empty()) std::cout << "report: " << path.string() << "\n";
    }
}

std::string fmt(const app::Json& v) {
    if (v.is_null()) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
    return buf;
}

int run(int argc, char** argv) {
    CLI::App cli{"Transient coherent phonon spectroscopy: simulation and analysis"};
    cli.require_subcommand(1);
    cli.set_version_flag("--version", std::string(app::kToolName) + " " + app::kToolVersion);

    Common sim_opts, ana_opts, q_opts, p_opts;
    auto* sim = cli.add_subcommand("simulate", "Simulate laser and Stokes pair spectra for every delay");
    add_common(sim, sim_opts);

    auto* ana = cli.add_subcommand("analyze", "Recover the dephasing rate from a spectra directory");
    std::string spectra_dir, method = "fourier_sideband", raman;
    bool fix_amplitude = false, no_correction = false;
    std::size_t bootstrap = 64;
    ana->add_option("spectra_dir", spectra_dir, "Directory written by simulate")->required();
    add_common(ana, ana_opts, false);
    ana->add_option("--method", method, "fourier_sideband or direct_fit");
    ana->add_option("--raman-spectrum", raman, "Raman line CSV (wavenumber_cm,intensity) to reconcile against");
    ana->add_flag("--fix-amplitude", fix_amplitude, "Fix v0 = 1 in the decay fit");
    ana->add_flag("--no-chromatic-correction", no_correction,
                  "Plain laser renormalisation, without the instrument-factor correction");
    ana->add_option("--bootstrap", bootstrap, "Poisson bootstrap resamples per spectrum");

    auto* qc = cli.add_subcommand("quantum-check", "Compare the Langevin simulation with the perturbative solution");
    add_common(qc, q_opts);

    auto* ps = cli.add_subcommand("power-scan", "Stokes yield and visibility versus pump energy");
    add_common(ps, p_opts);

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (sim->parsed()) {
        const auto cfg = resolve(sim_opts);
        const auto res = app::cmd_simulate(cfg, sim_opts.jobs);
        if (sim_opts.json_only) {
            std::cout << res.manifest.dump(2) << "\n";
        } else {
            std::cout << "wrote " << res.files.size() << " spectra and manifest.json to " << res.directory.string()
                      << "\n";
        }
        return 0;
    }
    if (ana->parsed()) {
        app::AnalyzeOptions o;
        try {
            o.method = analysis::parse_method(method);
        } catch (const DomainError& e) {
            throw ValidationError(e.what());
        }
        o.bootstrap_samples = bootstrap;
        o.fix_amplitude = fix_amplitude;
        o.chromatic_correction = !no_correction;
        o.plot = ana_opts.plot;
        if (!raman.empty()) o.raman_spectrum = fs::path(raman);
        if (!ana_opts.out.empty()) o.out_dir = fs::path(ana_opts.out);
        o.seed = ana_opts.seed;
        o.workers = ana_opts.jobs;
        const auto res = app::cmd_analyze(spectra_dir, o);
        const auto& r = res.report;
        std::string summary = "delays analysed: " + std::to_string(r["points"].size()) + " (" +
                              std::to_string(r["failures"].size()) + " failed)\n" +
                              "gamma: " + fmt(r["gamma_ps_inv"]) + " +- " + fmt(r["gamma_stderr_ps_inv"]) + " /ps\n" +
                              "lifetime: " + fmt(r["lifetime_ps"]) + " +- " + fmt(r["lifetime_stderr_ps"]) + " ps\n" +
                              "linewidth: " + fmt(r["linewidth_cm_inv"]) + " cm^-1\n" +
                              "Q factor: " + fmt(r["q_factor"]) + "\n";
        emit(r, {}, ana_opts.json_only, summary);
        if (!ana_opts.json_only) {
            for (const auto& p : res.written) std::cout << "wrote " << p.string() << "\n";
        }
        return 0;
    }
    if (qc->parsed()) {
        const auto cfg = resolve(q_opts);
        const auto r = app::cmd_quantum_check(cfg, q_opts.jobs);
        std::string summary = "grid points: " + std::to_string(r["points"].size()) +
                              ", all within 3 stderr: " + (r["all_within_3_stderr"].get<bool>() ? "yes" : "no") +
                              "\nR^2 vs exp(-gamma tau): " + fmt(r["r_squared"]) +
                              "\npopulation/amplitude rate ratio: " + fmt(r["rate_ratio"]) + "\n";
        for (const auto& w : r["warnings"]) summary += "warning: " + w.get<std::string>() + "\n";
        emit(r, cfg.output_dir / "quantum_check.json", q_opts.json_only, summary);
        return 0;
    }
    if (ps->parsed()) {
        const auto cfg = resolve(p_opts);
        const auto r = app::cmd_power_scan(cfg, p_opts.jobs);
        const auto& pts = r["points"];
        std::string summary = "log-log slope: " + fmt(r["loglog_slope"]) + " +- " + fmt(r["loglog_slope_stderr"]) +
                              "\nyield at " + fmt(pts.front()["energy_pj"]) + " pJ: " +
                              fmt(pts.front()["yield_measured"]) + " photons/pulse" + "\nyield at " +
                              fmt(pts.back()["energy_pj"]) + " pJ: " + fmt(pts.back()["yield_measured"]) +
                              " photons/pulse" + "\nvisibility spread: " + fmt(r["visibility_spread"]) + "\n";
        emit(r, cfg.output_dir / "power_scan.json", p_opts.json_only, summary);
        return 0;
    }
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const AnalysisError& e) {
        std::cerr << "analysis failed: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
