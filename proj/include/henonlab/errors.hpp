#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace henonlab {

using Complex = std::complex<double>;

/// Violated precondition or malformed input. The CLI maps this to exit code 2.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid map parameters (e.g. b == 0 where an inverse is required).
class ParameterError : public ContractError {
public:
    using ContractError::ContractError;
};

/// A computation was cut short by a budget or cap; carries what was achieved.
class IncompleteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace henonlab
