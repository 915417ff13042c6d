#ifndef MARC_ERRORS_HPP
#define MARC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace marc {

// Base class for all library errors so callers can catch in one place.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// alpha = 2 does not generate the full multiplicative group of GF(2^m).
struct NonPrimitivePolynomial : Error {
    explicit NonPrimitivePolynomial(const std::string& what) : Error(what) {}
};

struct DivisionByZero : Error {
    explicit DivisionByZero(const std::string& what) : Error(what) {}
};

struct LengthMismatch : Error {
    explicit LengthMismatch(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

} // namespace marc

#endif
