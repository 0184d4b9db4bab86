#include "tcups/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>
#include <vector>

#include "tcups/errors.hpp"

namespace tcups::io {

namespace fs = std::filesystem;

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ValidationError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    fs::path tmp = path;
    tmp += ".tmp" + std::to_string(std::random_device{}());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot move output into place at " + path.string());
    }
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

struct Table {
    std::string header_first;
    std::vector<double> a, b;
};

Table parse_two_columns(std::string_view text, std::string_view expected_header) {
    Table t;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
            throw ValidationError("line " + std::to_string(line_no) + ": expected two comma-separated fields");
        }
        if (!header_seen) {
            header_seen = true;
            if (!expected_header.empty() && line != expected_header) {
                throw ValidationError("line 1: expected header '" + std::string(expected_header) + "'");
            }
            t.header_first = std::string(line.substr(0, comma));
            continue;
        }
        try {
            t.a.push_back(parse_double(line.substr(0, comma)));
            t.b.push_back(parse_double(line.substr(comma + 1)));
        } catch (const ValidationError& e) {
            throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!header_seen) throw ValidationError("empty CSV");
    return t;
}

}  // namespace

std::string counts_to_csv(const instrument::CountsSpectrum& s) {
    std::string out = "wavelength_nm,counts\n";
    out.reserve(s.size() * 32);
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += format_double(s.bins[i]);
        out += ',';
        out += format_double(s.counts[i]);
        out += '\n';
    }
    return out;
}

instrument::CountsSpectrum counts_from_csv(std::string_view text) {
    Table t = parse_two_columns(text, "wavelength_nm,counts");
    instrument::CountsSpectrum s;
    s.bins = std::move(t.a);
    s.counts = std::move(t.b);
    s.integer_counts = true;
    for (double c : s.counts) {
        if (c != std::floor(c)) {
            s.integer_counts = false;
            break;
        }
    }
    try {
        s.validate();
    } catch (const DomainError& e) {
        throw ValidationError(std::string("invalid counts spectrum: ") + e.what());
    }
    return s;
}

void write_counts_csv(const fs::path& path, const instrument::CountsSpectrum& s) {
    write_file_atomic(path, counts_to_csv(s));
}

instrument::CountsSpectrum read_counts_csv(const fs::path& path) {
    try {
        return counts_from_csv(read_file(path));
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

Spectrum read_spectrum_csv(const fs::path& path) {
    Table t;
    try {
        t = parse_two_columns(read_file(path), "");
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    Axis axis;
    if (t.header_first == "wavelength_nm") axis = Axis::Wavelength;
    else if (t.header_first == "frequency_thz") axis = Axis::Frequency;
    else if (t.header_first == "wavenumber_cm") axis = Axis::Wavenumber;
    else throw ValidationError(path.string() + ": unknown axis column '" + t.header_first + "'");
    try {
        return Spectrum(axis, std::move(t.a), std::move(t.b));
    } catch (const DomainError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string spectrum_to_csv(const Spectrum& s) {
    std::string out;
    switch (s.axis()) {
        case Axis::Wavelength: out = "wavelength_nm,intensity\n"; break;
        case Axis::Frequency: out = "frequency_thz,intensity\n"; break;
        case Axis::Wavenumber: out = "wavenumber_cm,intensity\n"; break;
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += format_double(s.grid()[i]);
        out += ',';
        out += format_double(s.intensity()[i]);
        out += '\n';
    }
    return out;
}

}  // namespace tcups::io
