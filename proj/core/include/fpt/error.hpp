#pragma once

#include <stdexcept>
#include <string>

namespace fpt {

/// Malformed or inconsistent input data (bad file, ragged rows, wrong shape).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerically degenerate input: singular covariance, vanishing leading
/// eigenvalue, rank-deficient design.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace fpt
