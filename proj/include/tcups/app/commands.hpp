#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tcups/analysis.hpp"
#include "tcups/app/config.hpp"
#include "tcups/instrument.hpp"

namespace tcups::app {

inline constexpr const char* kToolName = "tcups";
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

// ---- simulate ---------------------------------------------------------------

struct DelayChannels {
    double delay = 0.0;
    instrument::CountsSpectrum laser;
    instrument::CountsSpectrum stokes;
};

// Simulated laser and Stokes pair spectra for excitation.delays[index]. Pure
// function of the configuration and index.
DelayChannels simulate_delay(const RunConfig& config, std::size_t index);

// File names carry the delay in shortest round-trip form: tau_0.4ps_stokes.csv.
std::string spectrum_file_name(double delay, bool stokes);
// Inverse of spectrum_file_name; nullopt for unrelated names.
std::optional<std::pair<double, bool>> parse_spectrum_file_name(const std::string& name);

struct SimulateResult {
    std::filesystem::path directory;
    std::vector<std::filesystem::path> files;  // CSVs in delay order, laser first
    Json manifest;
};

// Writes every CSV and manifest.json into config.output_dir. Delays are
// simulated concurrently on `workers` threads; outputs do not depend on it.
SimulateResult cmd_simulate(const RunConfig& config, unsigned workers = 0);

// ---- analyze ----------------------------------------------------------------

struct AnalyzeOptions {
    analysis::VisibilityMethod method = analysis::VisibilityMethod::FourierSideband;
    std::size_t bootstrap_samples = 64;
    bool fix_amplitude = false;
    // Cancel the wavelength dependence of the instrument factor between the
    // laser and Stokes channels. Needs the instrument from manifest.json.
    bool chromatic_correction = true;
    bool plot = false;
    std::optional<std::filesystem::path> raman_spectrum;  // CSV, wavenumber_cm axis
    std::optional<std::filesystem::path> out_dir;         // defaults to the spectra directory
    std::optional<std::uint64_t> seed;                    // bootstrap seed; defaults to manifest seed or 1
    unsigned workers = 0;
};

struct AnalyzeResult {
    Json report;
    std::vector<std::filesystem::path> written;  // report and plots
};

// Throws AnalysisError for a directory without complete laser/Stokes pairs or
// when fewer than three delays survive extraction.
AnalyzeResult cmd_analyze(const std::filesystem::path& spectra_dir, const AnalyzeOptions& options = {});

// ---- quantum-check ------------------------------------------------------------

Json cmd_quantum_check(const RunConfig& config, unsigned workers = 0);

// ---- power-scan ---------------------------------------------------------------

// Throws ValidationError unless there are >= 4 energies spanning >= 2 decades.
Json cmd_power_scan(const RunConfig& config, unsigned workers = 0);

// Current UTC time, ISO 8601.
std::string utc_timestamp();

}  // namespace tcups::app
