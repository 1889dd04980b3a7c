#pragma once

#include <stdexcept>
#include <string>

namespace powershade {

/// Base class for all library errors. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file (CSV/JSON/PNG). Message carries the line number
/// where applicable.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A color left the displayable range where the contract requires it inside.
class GamutError : public Error {
public:
    using Error::Error;
};

/// Invalid argument values: negative eccentricity, zero ellipse axis,
/// degenerate adaptation color, unachievable power target, empty image.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Model fitting failed: rank-deficient design, too few samples,
/// degenerate training data.
class FitError : public Error {
public:
    using Error::Error;
};

/// Dataset is missing required records (e.g. a staircase direction).
class IncompleteDataError : public Error {
public:
    using Error::Error;
};

}  // namespace powershade
