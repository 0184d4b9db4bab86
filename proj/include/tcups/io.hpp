#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tcups/instrument.hpp"
#include "tcups/spectrum.hpp"

namespace tcups::io {

// Shortest decimal representation that parses back to the identical double.
std::string format_double(double x);
double parse_double(std::string_view text);

// Writes via a temporary file in the same directory and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// Counts CSV: header "wavelength_nm,counts", one row per pixel, LF endings.
std::string counts_to_csv(const instrument::CountsSpectrum& s);
instrument::CountsSpectrum counts_from_csv(std::string_view text);
void write_counts_csv(const std::filesystem::path& path, const instrument::CountsSpectrum& s);
instrument::CountsSpectrum read_counts_csv(const std::filesystem::path& path);

// Two-column spectrum CSV with a header line; the axis kind is taken from the
// first header field (wavelength_nm, frequency_thz or wavenumber_cm).
Spectrum read_spectrum_csv(const std::filesystem::path& path);
std::string spectrum_to_csv(const Spectrum& s);

}  // namespace tcups::io
