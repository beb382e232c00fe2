#ifndef PANELSOM_ERRORS_HPP
#define PANELSOM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace panelsom {

// Contract violations in input data (bad CSV, duplicate keys, wrong arity).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Bad configuration: unknown variable codes, absent years, invalid k, ...
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Mathematically invalid values (non-positive deflator, non-stochastic matrix).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: non-convergence, reducible chain where irreducibility is required.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace panelsom

#endif
