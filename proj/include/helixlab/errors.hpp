#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace helixlab {

/// Base class of every error the library reports. Catching this at the CLI
/// boundary separates analysis failures (exit 1) from usage errors (exit 2).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed expression or document text. Carries the byte offset of the
/// failure and the set of tokens that would have been accepted there.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& msg, std::size_t offset,
                std::vector<std::string> expected = {})
        : Error(msg + " (offset " + std::to_string(offset) + ")"),
          offset_(offset),
          expected_(std::move(expected)) {}

    std::size_t offset() const { return offset_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// Identifier that is neither the declared parameter nor a known
/// function or constant.
class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(const std::string& name, std::size_t offset)
        : Error("unknown identifier '" + name + "' (offset " +
                std::to_string(offset) + ")"),
          name_(name),
          offset_(offset) {}

    const std::string& name() const { return name_; }
    std::size_t offset() const { return offset_; }

private:
    std::string name_;
    std::size_t offset_;
};

/// Evaluation left the domain of a function (log/sqrt of a negative
/// value, division by zero).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Required key missing from a `.curve` / `.fn` document.
class MissingField : public Error {
public:
    explicit MissingField(const std::string& field)
        : Error("missing field '" + field + "'"), field_(field) {}

    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// The causal character of the tangent (or normal) changes across the
/// sampling grid; the message names the bracketing parameter interval.
class MixedCausalType : public Error {
public:
    MixedCausalType(const std::string& msg, double bracket_lo, double bracket_hi)
        : Error(msg), lo_(bracket_lo), hi_(bracket_hi) {}

    double bracket_lo() const { return lo_; }
    double bracket_hi() const { return hi_; }

private:
    double lo_, hi_;
};

/// Curvature or torsion vanishes on a subinterval, or the acceleration is
/// zero where the frame construction needs it.
class DegenerateCurve : public Error {
public:
    using Error::Error;
};

/// A computed frame violates the Gram matrix of its class beyond tolerance.
class FrameClosureError : public Error {
public:
    using Error::Error;
};

/// The discriminant of the requested sigma branch changes sign inside the
/// domain, so the branch's axis formula is undefined there.
class BranchUndefined : public Error {
public:
    BranchUndefined(const std::string& msg, double bracket_lo, double bracket_hi)
        : Error(msg), lo_(bracket_lo), hi_(bracket_hi) {}

    double bracket_lo() const { return lo_; }
    double bracket_hi() const { return hi_; }

private:
    double lo_, hi_;
};

/// Torsion changes sign where a single-sign fit is required.
class SignChange : public Error {
public:
    using Error::Error;
};

/// The fitted line b*s + c vanishes inside the fit domain.
class PoleInDomain : public Error {
public:
    using Error::Error;
};

/// Fewer valid points than a statistic needs.
class TooFewPoints : public Error {
public:
    using Error::Error;
};

/// Torsion generation left the validity region of its branch before the
/// end of the requested range; reports the s actually reached.
class BranchExit : public Error {
public:
    BranchExit(const std::string& msg, double reached_s)
        : Error(msg), reached_(reached_s) {}

    double reached_s() const { return reached_; }

private:
    double reached_;
};

/// Step halving drove the integration step below 1e-12 of the range.
class StepUnderflow : public Error {
public:
    using Error::Error;
};

/// A scalar function spec could not be evaluated where the integrator
/// asked for it.
class EvalError : public Error {
public:
    using Error::Error;
};

/// Filesystem read/write failure.
class IOError : public Error {
public:
    using Error::Error;
};

}  // namespace helixlab
