#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace amdp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RowSumError : public Error {
public:
    RowSumError(std::uint64_t state, std::uint64_t action, double sum);
    std::uint64_t state;
    std::uint64_t action;
    double sum;
};

class AbsorbingViolation : public Error {
public:
    using Error::Error;
};

class DuplicateSuccessor : public Error {
public:
    DuplicateSuccessor(std::uint64_t state, std::uint64_t action, std::uint64_t successor);
};

/// A table model lists a successor state that has no rows of its own.
class MissingRow : public Error {
public:
    using Error::Error;
};

class UnknownBuiltin : public Error {
public:
    explicit UnknownBuiltin(const std::string& name);
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class TruncationLeak : public Error {
public:
    TruncationLeak(double leaked, double tolerance);
    double leaked;
};

class WindowTooSmall : public Error {
public:
    WindowTooSmall(std::uint64_t state, std::uint64_t window, std::uint64_t margin);
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, long sweeps, double residual);
};

class SignIndefiniteCost : public Error {
public:
    using Error::Error;
};

class EvaluationOverflow : public Error {
public:
    EvaluationOverflow(std::uint64_t state, double value);
};

class SupportExplosion : public Error {
public:
    explicit SupportExplosion(std::size_t cap);
};

class HorizonMismatch : public Error {
public:
    HorizonMismatch(int lhs, int rhs);
};

/// Malformed JSON; carries the 1-based line of the offending byte.
class ParseError : public Error {
public:
    ParseError(const std::string& path, std::size_t line, const std::string& detail);
    std::size_t line;
};

/// Well-formed JSON that does not match the model/strategy/mu schemas.
class SchemaError : public Error {
public:
    using Error::Error;
};

} // namespace amdp
