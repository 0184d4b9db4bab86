#pragma once

#include <stdexcept>
#include <string>

namespace tcups {

// Precondition violated by a numeric argument (non-positive delay, T <= 0, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed configuration or input file. Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A measurement step could not produce a result (no sideband, fit failed, ...).
// Maps to CLI exit code 3.
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem failure. Maps to CLI exit code 4.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tcups
