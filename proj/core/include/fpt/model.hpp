#pragma once

// FAR(1) noise model: PCA-regularised estimation of the autoregression
// operator, residuals, innovation covariance, and frequency-domain transfer
// operators of linear processes.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fpt/hilbert.hpp"
#include "fpt/spectral.hpp"

namespace fpt {

/// How many principal components of C_0 the estimator keeps.
struct ComponentRule {
    double variance_threshold = 0.99; ///< smallest k with cumulative share >= threshold
    std::optional<std::size_t> fixed_k; ///< overrides the threshold when set

    static ComponentRule share(double threshold) { return {threshold, std::nullopt}; }
    static ComponentRule fixed(std::size_t k) { return {0.99, k}; }
};

struct FarModel {
    OperatorMatrix rho_hat;
    std::size_t k_used = 0;
    CoefVector mean;
    double explained_variance = 0.0;
    double rho_norm = 0.0; ///< operator norm of rho_hat
    bool nonstationary = false; ///< rho_norm >= 1

    /// rho_hat = 0 with the sample mean of `series`; the iid noise model.
    static FarModel zero(const CoefSeries& series);
};

struct InnovationCov {
    OperatorMatrix sigma_hat;
    EigenSystem eigen;
};

CoefVector sample_mean(const CoefSeries& series);
CoefSeries center(const CoefSeries& series, const CoefVector& mean);

/// C_h = (n-h)^{-1} sum_t (X_{t+h} - mean) (X_t - mean)^T for h in {0, 1}.
OperatorMatrix lag_autocov(const CoefSeries& series, int h);

/// rho_hat = C_1 P_k C_0^+ P_k with P_k the projection on the top-k
/// eigenvectors of C_0. Throws NumericalError if a retained eigenvalue is
/// below 1e-12 * lambda_1.
FarModel estimate_far1(const CoefSeries& series, const ComponentRule& rule = {});

/// Row k-2 is (X_k - mean) - rho_hat (X_{k-1} - mean), k = 2..n.
CoefSeries residuals(const CoefSeries& series, const FarModel& model);

/// Sigma_hat = m^{-1} sum_k e_k e_k^T over the m residual rows, not recentred.
InnovationCov innovation_cov(const CoefSeries& resid);

/// Smallest j >= 1 with -log(1 - lambda_j / lambda_1) <= threshold, capped at
/// the number of eigenvalues. Throws NumericalError if lambda_1 <= 0.
std::size_t select_a_n(const EigenSystem& eigen, double threshold = 0.01);
std::size_t select_a_n(std::span<const double> eigenvalues, double threshold = 0.01);

/// A(w) = sum_k a_k e^{-i k w}.
ComplexOperatorMatrix transfer_operator(std::span<const std::pair<int, OperatorMatrix>> coeffs, double omega);

/// I - e^{-i w_j} rho for every fundamental frequency of `grid`.
std::vector<ComplexOperatorMatrix> far1_inverse_filters(const OperatorMatrix& rho, const FrequencyGrid& grid);

/// F(w) = A(w) Sigma A(w)^*.
ComplexOperatorMatrix spectral_density(const ComplexOperatorMatrix& transfer, const OperatorMatrix& sigma);

} // namespace fpt
