#pragma once

#include <stdexcept>
#include <string>

namespace homog {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied input was violated. `field()` names the
/// offending parameter (e.g. "law.bounds") when one is known.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message, std::string field = {});
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Too much negative spectrum had to be clipped in circulant embedding.
class SpectrumError : public Error {
public:
    using Error::Error;
};

/// Right-hand side of a singular (mean-zero) system is not mean-zero.
class IncompatibleRhsError : public Error {
public:
    using Error::Error;
};

/// Iterative solver hit its iteration cap.
class NonConvergenceError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace homog
