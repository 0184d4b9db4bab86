#include "tcups/app/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>

#include "tcups/errors.hpp"
#include "tcups/io.hpp"

namespace tcups::app {

using nlohmann::json;

double ExcitationSettings::delay_scan_energy() const {
    if (scan_energy > 0.0) return scan_energy;
    return energies.empty() ? 0.0 : *std::max_element(energies.begin(), energies.end());
}

namespace {

// 1-based line of the first occurrence of the quoted keys, searched in order.
std::size_t locate(std::string_view text, const std::vector<std::string>& keys) {
    std::size_t pos = 0;
    bool found = false;
    for (const auto& k : keys) {
        if (k.empty() || k.front() == '[') continue;
        const auto p = text.find("\"" + k + "\"", pos);
        if (p == std::string_view::npos) break;
        pos = p;
        found = true;
    }
    if (!found) return 0;
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Reader {
public:
    Reader(std::string_view text, std::string_view origin) : text_(text), origin_(origin) {}

    void error(const std::vector<std::string>& path, const std::string& msg) {
        std::string dotted;
        for (const auto& p : path) {
            if (!dotted.empty() && p.front() != '[') dotted += '.';
            dotted += p;
        }
        std::string line = std::string(origin_);
        if (const auto n = locate(text_, path); n > 0) line += ":" + std::to_string(n);
        errors_.push_back(line + ": " + (dotted.empty() ? "" : "field '" + dotted + "': ") + msg);
    }

    // Visits `obj` as a section; unknown keys are errors.
    void section(const json& obj, const std::vector<std::string>& path,
                 const std::set<std::string>& allowed) {
        if (!obj.is_object()) {
            error(path, "must be an object");
            return;
        }
        for (const auto& [k, v] : obj.items()) {
            (void)v;
            if (!allowed.count(k)) {
                auto p = path;
                p.push_back(k);
                error(p, "unknown key");
            }
        }
    }

    void number(const json& obj, const std::vector<std::string>& path, const std::string& key,
                double& out, double lo, bool lo_inclusive,
                double hi = std::numeric_limits<double>::infinity()) {
        if (!obj.is_object() || !obj.contains(key)) return;
        auto p = path;
        p.push_back(key);
        const json& v = obj.at(key);
        if (!v.is_number()) {
            error(p, "must be a number");
            return;
        }
        const double x = v.get<double>();
        const bool lo_ok = lo_inclusive ? x >= lo : x > lo;
        if (!std::isfinite(x) || !lo_ok || x > hi) {
            std::string range = std::string(lo_inclusive ? ">= " : "> ") + io::format_double(lo);
            if (std::isfinite(hi)) range += " and <= " + io::format_double(hi);
            error(p, "must be " + range + " (got " + io::format_double(x) + ")");
            return;
        }
        out = x;
    }

    template <class Int>
    void integer(const json& obj, const std::vector<std::string>& path, const std::string& key,
                 Int& out, Int lo) {
        if (!obj.is_object() || !obj.contains(key)) return;
        auto p = path;
        p.push_back(key);
        const json& v = obj.at(key);
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
            error(p, "must be a non-negative integer");
            return;
        }
        const auto x = v.get<std::uint64_t>();
        if (x < static_cast<std::uint64_t>(lo)) {
            error(p, "must be >= " + std::to_string(lo));
            return;
        }
        out = static_cast<Int>(x);
    }

    void string(const json& obj, const std::vector<std::string>& path, const std::string& key,
                const std::function<void(const std::string&)>& assign) {
        if (!obj.is_object() || !obj.contains(key)) return;
        auto p = path;
        p.push_back(key);
        const json& v = obj.at(key);
        if (!v.is_string()) {
            error(p, "must be a string");
            return;
        }
        try {
            assign(v.get<std::string>());
        } catch (const std::exception& e) {
            error(p, e.what());
        }
    }

    void number_list(const json& obj, const std::vector<std::string>& path, const std::string& key,
                     std::vector<double>& out, double lo, bool lo_inclusive) {
        if (!obj.is_object() || !obj.contains(key)) return;
        auto p = path;
        p.push_back(key);
        const json& v = obj.at(key);
        if (!v.is_array()) {
            error(p, "must be an array of numbers");
            return;
        }
        std::vector<double> vals;
        for (std::size_t i = 0; i < v.size(); ++i) {
            auto pi = p;
            pi.push_back("[" + std::to_string(i) + "]");
            if (!v[i].is_number()) {
                error(pi, "must be a number");
                return;
            }
            const double x = v[i].get<double>();
            if (!std::isfinite(x) || (lo_inclusive ? x < lo : x <= lo)) {
                error(pi, std::string("must be ") + (lo_inclusive ? ">= " : "> ") + io::format_double(lo));
                return;
            }
            vals.push_back(x);
        }
        out = std::move(vals);
    }

    void finish() const {
        if (errors_.empty()) return;
        std::string msg = "invalid configuration";
        for (const auto& e : errors_) msg += "\n  " + e;
        throw ValidationError(msg);
    }

private:
    std::string_view text_;
    std::string_view origin_;
    std::vector<std::string> errors_;
};

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) return false;
    }
    return true;
}

}  // namespace

void RunConfig::validate() const {
    std::vector<std::string> problems;
    auto check = [&](bool ok, const std::string& what) {
        if (!ok) problems.push_back(what);
    };
    check(!excitation.delays.empty(), "excitation.delays_ps must not be empty");
    check(strictly_increasing(excitation.delays), "excitation.delays_ps must be strictly increasing");
    for (double d : excitation.delays) check(d > 0.0, "excitation.delays_ps entries must be > 0");
    check(!excitation.energies.empty(), "excitation.energies_pj must not be empty");
    check(shots >= 1, "ensemble.shots must be >= 1");
    check(quantum.delays.empty() || strictly_increasing(quantum.delays),
          "quantum.delays_ps must be strictly increasing");
    check(quantum.delays.empty() ? strictly_increasing(quantum.gamma_tau) : true,
          "quantum.gamma_tau must be strictly increasing");
    try {
        material.validate();
        const double lam = physics::stokes_wavelength(excitation.pump_wavelength, material.raman_shift);
        check(lam > 0.0, "Stokes wavelength must be positive");
        instrument.model.validate();
        check(instrument.exposure > 0.0, "instrument.exposure_pulses must be > 0");
        langevin().validate();
        if (quantum.delays.empty() && langevin().gamma == 0.0) {
            problems.push_back("quantum.gamma_tau cannot define delays when the quantum gamma is 0; "
                               "give quantum.delays_ps");
        }
    } catch (const DomainError& e) {
        problems.push_back(e.what());
    }
    if (!problems.empty()) {
        std::string msg = "invalid configuration";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ValidationError(msg);
    }
}

quantum::LangevinParams RunConfig::langevin() const {
    quantum::LangevinParams p;
    p.coupling = quantum.coupling;
    p.pump_duration = quantum.pump_duration;
    p.gamma = quantum.gamma < 0.0 ? material.gamma : quantum.gamma;
    p.dt = quantum.dt;
    p.trajectories = quantum.trajectories;
    p.seed = seed;
    p.thermal_population = quantum.thermal_population;
    return p;
}

std::vector<double> RunConfig::quantum_delays() const {
    if (!quantum.delays.empty()) return quantum.delays;
    const double g = langevin().gamma;
    std::vector<double> out;
    for (double gt : quantum.gamma_tau) out.push_back(gt / g);
    return out;
}

RunConfig parse_config(std::string_view text, std::string_view origin) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto byte = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte == 0 ? 0 : byte - 1), '\n');
        throw ValidationError(std::string(origin) + ":" + std::to_string(line) + ": JSON syntax error: " + e.what());
    }

    RunConfig c;
    Reader r(text, origin);
    r.section(doc, {}, {"material", "excitation", "ensemble", "instrument", "power_scan", "quantum", "output_dir"});
    if (!doc.is_object()) r.finish();

    if (doc.contains("material")) {
        const json& m = doc["material"];
        const std::vector<std::string> p{"material"};
        r.section(m, p, {"raman_shift_cm", "gamma_ps_inv", "raman_gain_cm_per_mw", "vibrational_energy_cm"});
        r.number(m, p, "raman_shift_cm", c.material.raman_shift, 0.0, false);
        r.number(m, p, "gamma_ps_inv", c.material.gamma, 0.0, false);
        r.number(m, p, "raman_gain_cm_per_mw", c.material.raman_gain, 0.0, false);
        r.number(m, p, "vibrational_energy_cm", c.material.vibrational_energy, 0.0, false);
    }
    if (doc.contains("excitation")) {
        const json& x = doc["excitation"];
        const std::vector<std::string> p{"excitation"};
        r.section(x, p, {"pump_wavelength_nm", "duration_fs", "energies_pj", "delays_ps", "scan_energy_pj",
                         "yield_photons_per_pj", "laser_photons_per_pulse"});
        r.number(x, p, "pump_wavelength_nm", c.excitation.pump_wavelength, 0.0, false);
        r.number(x, p, "duration_fs", c.excitation.duration_fwhm, 0.0, false);
        r.number_list(x, p, "energies_pj", c.excitation.energies, 0.0, false);
        r.number_list(x, p, "delays_ps", c.excitation.delays, 0.0, false);
        r.number(x, p, "scan_energy_pj", c.excitation.scan_energy, 0.0, false);
        r.number(x, p, "yield_photons_per_pj", c.excitation.yield_calibration, 0.0, false);
        r.number(x, p, "laser_photons_per_pulse", c.excitation.laser_photons, 0.0, false);
    }
    if (doc.contains("ensemble")) {
        const json& e = doc["ensemble"];
        const std::vector<std::string> p{"ensemble"};
        r.section(e, p, {"shots", "seed", "phase_model"});
        r.integer(e, p, "shots", c.shots, std::size_t{1});
        r.integer(e, p, "seed", c.seed, std::uint64_t{0});
        r.string(e, p, "phase_model", [&](const std::string& s) { c.phase_model = classical::parse_phase_model(s); });
    }
    if (doc.contains("instrument")) {
        const json& i = doc["instrument"];
        const std::vector<std::string> p{"instrument"};
        r.section(i, p, {"grating", "resolution_fwhm_nm", "pixel_width_nm", "efficiency", "noise", "exposure_pulses"});
        double grating = c.instrument.model.grating;
        r.number(i, p, "grating", grating, 0.0, false);
        const bool custom = i.is_object() && i.contains("resolution_fwhm_nm") && i.contains("pixel_width_nm");
        if (!custom) {
            try {
                const auto d = instrument::InstrumentModel::for_grating(grating);
                c.instrument.model.resolution_fwhm = d.resolution_fwhm;
                c.instrument.model.pixel_width = d.pixel_width;
            } catch (const DomainError& e) {
                r.error({"instrument", "grating"}, e.what());
            }
        }
        c.instrument.model.grating = grating;
        r.number(i, p, "resolution_fwhm_nm", c.instrument.model.resolution_fwhm, 0.0, true);
        r.number(i, p, "pixel_width_nm", c.instrument.model.pixel_width, 0.0, false);
        r.number(i, p, "efficiency", c.instrument.model.efficiency, 0.0, false, 1.0);
        r.string(i, p, "noise", [&](const std::string& s) { c.instrument.model.noise = instrument::parse_noise_model(s); });
        r.number(i, p, "exposure_pulses", c.instrument.exposure, 0.0, false);
    }
    if (doc.contains("power_scan")) {
        const json& s = doc["power_scan"];
        const std::vector<std::string> p{"power_scan"};
        r.section(s, p, {"delay_ps"});
        r.number(s, p, "delay_ps", c.power_scan_delay, 0.0, false);
    }
    if (doc.contains("quantum")) {
        const json& q = doc["quantum"];
        const std::vector<std::string> p{"quantum"};
        r.section(q, p, {"coupling_ps_inv", "pump_duration_ps", "gamma_ps_inv", "dt_ps", "trajectories",
                         "thermal_population", "gamma_tau", "delays_ps"});
        r.number(q, p, "coupling_ps_inv", c.quantum.coupling, 0.0, true);
        r.number(q, p, "pump_duration_ps", c.quantum.pump_duration, 0.0, false);
        r.number(q, p, "gamma_ps_inv", c.quantum.gamma, 0.0, true);
        r.number(q, p, "dt_ps", c.quantum.dt, 0.0, false);
        r.integer(q, p, "trajectories", c.quantum.trajectories, std::size_t{2});
        r.number(q, p, "thermal_population", c.quantum.thermal_population, 0.0, true);
        r.number_list(q, p, "gamma_tau", c.quantum.gamma_tau, 0.0, true);
        r.number_list(q, p, "delays_ps", c.quantum.delays, 0.0, true);
    }
    if (doc.contains("output_dir")) {
        r.string(doc, {}, "output_dir", [&](const std::string& s) {
            if (s.empty()) throw ValidationError("must not be empty");
            c.output_dir = s;
        });
    }
    r.finish();
    try {
        c.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string(origin) + ": " + e.what());
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const IoError&) {
        throw ValidationError("cannot read configuration file " + path.string());
    }
    return parse_config(text, path.string());
}

void apply_environment(RunConfig& config) {
    if (const char* dir = std::getenv("TCUPS_OUTPUT_DIR"); dir && *dir) config.output_dir = dir;
    if (const char* seed = std::getenv("TCUPS_SEED"); seed && *seed) {
        char* end = nullptr;
        errno = 0;
        const unsigned long long v = std::strtoull(seed, &end, 10);
        if (*end != '\0' || errno != 0 || seed[0] == '-') {
            throw ValidationError(std::string("TCUPS_SEED: not an unsigned integer: '") + seed + "'");
        }
        config.seed = v;
    }
}

nlohmann::ordered_json to_json(const RunConfig& c) {
    nlohmann::ordered_json j;
    j["material"] = {{"raman_shift_cm", c.material.raman_shift},
                     {"gamma_ps_inv", c.material.gamma},
                     {"raman_gain_cm_per_mw", c.material.raman_gain},
                     {"vibrational_energy_cm", c.material.vibrational_energy}};
    j["excitation"] = {{"pump_wavelength_nm", c.excitation.pump_wavelength},
                       {"duration_fs", c.excitation.duration_fwhm},
                       {"energies_pj", c.excitation.energies},
                       {"delays_ps", c.excitation.delays},
                       {"scan_energy_pj", c.excitation.delay_scan_energy()},
                       {"yield_photons_per_pj", c.excitation.yield_calibration},
                       {"laser_photons_per_pulse", c.excitation.laser_photons}};
    j["ensemble"] = {{"shots", c.shots}, {"seed", c.seed}, {"phase_model", classical::phase_model_name(c.phase_model)}};
    j["instrument"] = {{"grating", c.instrument.model.grating},
                       {"resolution_fwhm_nm", c.instrument.model.resolution_fwhm},
                       {"pixel_width_nm", c.instrument.model.pixel_width},
                       {"efficiency", c.instrument.model.efficiency},
                       {"noise", instrument::noise_model_name(c.instrument.model.noise)},
                       {"exposure_pulses", c.instrument.exposure}};
    j["power_scan"] = {{"delay_ps", c.power_scan_delay}};
    nlohmann::ordered_json q = {{"coupling_ps_inv", c.quantum.coupling},
                                {"pump_duration_ps", c.quantum.pump_duration},
                                {"gamma_ps_inv", c.langevin().gamma},
                                {"dt_ps", c.quantum.dt},
                                {"trajectories", c.quantum.trajectories},
                                {"thermal_population", c.quantum.thermal_population},
                                {"gamma_tau", c.quantum.gamma_tau}};
    if (!c.quantum.delays.empty()) q["delays_ps"] = c.quantum.delays;
    j["quantum"] = q;
    j["output_dir"] = c.output_dir.string();
    return j;
}

std::string config_hash(const RunConfig& config) {
    // The output location does not influence any result.
    auto j = to_json(config);
    j.erase("output_dir");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace tcups::app
