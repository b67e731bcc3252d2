#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qwalk {

/// Bad argument value (negative lattice size, mismatched vector length, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A precondition on the input state was violated (e.g. not normalized).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Amplitude would be shifted past the edge of the lattice.
class BoundaryOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Cost function produced a non-finite value; carries the offending point.
class NumericFailure : public std::runtime_error {
public:
    NumericFailure(const std::string& what, std::vector<double> point)
        : std::runtime_error(what), point_(std::move(point)) {}

    const std::vector<double>& point() const noexcept { return point_; }

private:
    std::vector<double> point_;
};

/// Measurement intensities that no amplitude pair can produce.
class InconsistentData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qwalk
