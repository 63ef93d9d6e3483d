#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace graphdeconv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Mask = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Error hierarchy. Everything thrown by the library derives from Error so
// callers (the CLI in particular) can map families to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A precondition on the *shape* or structure of an input was violated
/// (non-symmetric GSO, mismatched dimensions, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Node with zero degree where D^{-1/2} is needed.
class DegenerateDegreeError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A frequency response vanishes (to tolerance) at some graph frequency.
class InvertibilityError : public DomainError {
public:
    using DomainError::DomainError;
};

/// A random generator could not produce a valid object.
class GenerationError : public Error {
public:
    using Error::Error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
    explicit ParseError(const std::string& what) : ParseError(what, 0) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input whose values are out of the accepted range.
class ValidationError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require_dims(bool ok, const char* what) {
    if (!ok) throw ContractViolation(std::string("dimension mismatch: ") + what);
}

}  // namespace detail

}  // namespace graphdeconv
