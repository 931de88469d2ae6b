#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace bsl {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Mismatched vector/matrix dimensions between caller and callee.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Bad argument value (negative count, out-of-range tuning constant, ...).
class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

// Covariance factorization failed even after the jitter retry.  Callers in
// sampling loops treat this as "reject the proposal", not as a crash.
class NonPositiveDefiniteError : public Error {
public:
    using Error::Error;
};

// A simulator produced a non-finite or wrongly sized summary.  Carries the
// batch index of the first offending draw.
class SimulatorError : public Error {
public:
    SimulatorError(const std::string& what, long index)
        : Error(what), index_(index) {}
    long index() const { return index_; }

private:
    long index_;
};

// External simulator subprocess broke the wire protocol (malformed line,
// id mismatch, timeout, premature exit).  Never retried.
class ProtocolError : public Error {
public:
    using Error::Error;
};

// Chain initialization could not find a point with finite posterior density.
class InitializationError : public Error {
public:
    using Error::Error;
};

// Config file rejected.  Collects every violation, not just the first.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations)) {}
    const std::vector<std::string>& violations() const { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid config:";
        for (const auto& s : v) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }
    std::vector<std::string> violations_;
};

// Filesystem trouble while writing run outputs.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace bsl
