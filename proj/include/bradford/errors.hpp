#pragma once

#include <stdexcept>
#include <string>

namespace bradford {

// Argument outside the domain where a closed form is defined (alpha not in
// (0,1), rho <= 1 where rho - 1 appears as a factor, log argument < 1).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Inputs are valid individually but admit no solution together.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A core zone of a single journal: the core ratio slope k is undefined.
class DegenerateCoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No journal is more productive than the zone boundary.
class EmptyCoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace bradford
