#pragma once

#include <stdexcept>
#include <string>

namespace colluscan {

// Input/validation problems: bad files, malformed rows, contract violations
// caused by the caller's data. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Broken internal invariants (a bug, not bad input). CLI exit code 2.
class InternalError : public std::runtime_error {
public:
    explicit InternalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace colluscan
