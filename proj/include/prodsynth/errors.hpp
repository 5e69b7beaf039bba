#pragma once

#include <stdexcept>
#include <string>

namespace prodsynth {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or inconsistent input data (files, configs, cross-references). CLI exit code 2.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

// Data that is structurally fine but unusable (e.g. a single-class training set).
// CLI exit code 3.
class DegenerateDataError : public Error {
public:
    explicit DegenerateDataError(const std::string& msg) : Error(msg) {}
};

}  // namespace prodsynth
