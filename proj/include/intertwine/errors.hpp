#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace intertwine {

/// Non-finite input or a value outside the domain of a numeric routine.
class numeric_domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A group-valued state wandered too far from its group; the step size is too large.
class drift_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised by the weighted log-linear fit when a mean is not strictly positive.
class fit_domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The Green–Kubo oracle could not produce a rate (non-decaying correlation).
class oracle_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class unsupported_configuration : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class parse_error : public std::runtime_error {
public:
    parse_error(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace intertwine
