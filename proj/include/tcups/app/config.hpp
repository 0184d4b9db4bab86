#pragma once

// Run configuration: one JSON document, every section optional, unknown keys
// rejected. Defaults describe the diamond experiment (788 nm, 80 fs pulses).

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tcups/classical_model.hpp"
#include "tcups/instrument.hpp"
#include "tcups/physics.hpp"
#include "tcups/quantum_model.hpp"

namespace tcups::app {

struct ExcitationSettings {
    double pump_wavelength = 788.0;  // nm
    double duration_fwhm = 80.0;     // fs
    std::vector<double> energies{1.1, 3.3, 11.0, 33.0, 110.0, 380.0};  // pJ
    std::vector<double> delays{0.4, 0.8, 1.2, 1.6, 2.0, 2.4, 2.8, 3.2, 3.6, 4.0};  // ps
    double scan_energy = 0.0;         // pJ for the delay scan; 0 means max(energies)
    double yield_calibration = physics::kDefaultYieldCalibration;  // photons/pJ
    double laser_photons = 10.0;      // attenuated laser photons per pulse reaching the slit

    double delay_scan_energy() const;
};

struct InstrumentSettings {
    instrument::InstrumentModel model;
    double exposure = 250000.0;       // pulses integrated per spectrum
};

struct QuantumSettings {
    double coupling = 0.125;          // ps^-1
    double pump_duration = 0.08;      // ps
    double gamma = -1.0;              // ps^-1; negative means material gamma
    double dt = 0.004;                // ps
    std::size_t trajectories = 10000;
    double thermal_population = 0.0;
    std::vector<double> gamma_tau{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
    std::vector<double> delays;       // ps; overrides gamma_tau when non-empty
};

struct RunConfig {
    physics::MaterialParams material;
    ExcitationSettings excitation;
    std::size_t shots = 10000;
    std::uint64_t seed = 1;
    classical::PhaseModel phase_model = classical::PhaseModel::CauchyFrequency;
    InstrumentSettings instrument;
    double power_scan_delay = 0.51;   // ps
    QuantumSettings quantum;
    std::filesystem::path output_dir = "tcups_out";

    // Cross-field checks; throws ValidationError listing every problem.
    void validate() const;

    quantum::LangevinParams langevin() const;
    std::vector<double> quantum_delays() const;
};

// Parses and validates. Diagnostics name the field path and, where it can be
// located, the source line. `origin` labels messages (usually the file name).
RunConfig parse_config(std::string_view text, std::string_view origin = "config");
RunConfig load_config(const std::filesystem::path& path);

// Applies TCUPS_OUTPUT_DIR and TCUPS_SEED when set.
void apply_environment(RunConfig& config);

// Full effective configuration; parse_config(to_json(c).dump()) reproduces c.
nlohmann::ordered_json to_json(const RunConfig& config);

// FNV-1a 64 of the compact effective configuration, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace tcups::app
