#pragma once

// Discrete Fourier transforms of coefficient series evaluated at the
// fundamental frequencies w_j = 2*pi*j/n, j = 1..q, q = floor((n-1)/2).

#include <cstddef>
#include <span>
#include <vector>

#include "fpt/hilbert.hpp"

namespace fpt {

/// n x p real matrix; row t (0-based) holds the coefficients of X_{t+1}.
using CoefSeries = Eigen::MatrixXd;

struct FrequencyGrid {
    std::size_t n = 0;
    std::size_t q = 0;
    std::vector<double> omegas; ///< omegas[j-1] = 2*pi*j/n
};

/// Throws std::invalid_argument for n < 3.
FrequencyGrid fundamental_frequencies(std::size_t n);

/// Row j-1 holds n^{-1/2} sum_t X_t e^{-i t w_j}.
struct DftTable {
    FrequencyGrid grid;
    Eigen::MatrixXcd rows; ///< q x p

    std::size_t q() const { return grid.q; }
    std::size_t dim() const { return static_cast<std::size_t>(rows.cols()); }
    ComplexCoefVector row(std::size_t j) const; ///< 1-based frequency index
};

struct MaxResult {
    double value = 0.0;
    std::size_t argmax_j = 0; ///< 1-based
    double implied_period = 0.0;
};

DftTable dft(const CoefSeries& series);

/// Transform at every frequency 2*pi*j/n, j = 0..n-1, with the same
/// normalisation as dft(). Used for energy identities.
Eigen::MatrixXcd full_dft(const CoefSeries& series);

/// ||row j||^2, which equals the HS norm of the periodogram operator.
std::vector<double> periodogram_norms(const DftTable& table);

/// X_n(w_j) ⊗ X_n(w_j) for 1 <= j <= q.
ComplexOperatorMatrix periodogram_operator(const DftTable& table, std::size_t j);

/// Maximum with ties broken toward the smallest index.
MaxResult max_norm(std::span<const double> norms, std::size_t n);

/// Replaces row j by filters[j-1] * row j.
DftTable filter_dft(const DftTable& table, std::span<const ComplexOperatorMatrix> filters);

} // namespace fpt
