#pragma once

// Gumbel limit law, centering sequences for the maximum periodogram, and the
// hypoexponential law of ||X_n(w_j)||^2 under Gaussian noise.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fpt {

using Rng = std::mt19937_64;

double gumbel_cdf(double x);

/// -log(-log p). Throws std::invalid_argument unless 0 < p < 1.
double gumbel_quantile(double p);

/// Upper tail 1 - gumbel_cdf(x), evaluated without cancellation.
double gumbel_sf(double x);

/// lambda_1 * (log q - sum_{j=2}^d log(1 - lambda_j / lambda_1)).
///
/// Uses the first d entries of `eigenvalues`, which must be strictly
/// decreasing with lambda_1 > 0. Throws std::invalid_argument on a
/// non-decreasing sequence or when 1 - lambda_j/lambda_1 < 1e-8.
double centering_b(std::int64_t q, std::span<const double> eigenvalues, std::size_t d);

/// centering_b over the whole supplied list, taken as the d -> infinity limit.
/// The truncation error of the next term is bounded by
/// lambda_1 * lambda_last / (lambda_1 - lambda_2); if that exceeds tail_tol the
/// list is considered too short and std::invalid_argument is thrown.
double centering_b_limit(std::int64_t q, std::span<const double> eigenvalues, double tail_tol = 1e-4);

/// log q + (d-1) log log q - log (d-1)!, the centering for whitened
/// d-dimensional data. Requires q >= 3 and d >= 1.
double centering_c(std::int64_t q, std::size_t d);

/// Law of a sum of independent exponentials with distinct means
/// lambda_1 > ... > lambda_d > 0.
class HypoExpSpec {
public:
    explicit HypoExpSpec(std::vector<double> means);

    std::span<const double> means() const { return means_; }
    std::size_t dim() const { return means_.size(); }

    /// alpha_{k,d} = prod_{j != k} (1 - lambda_j / lambda_k)^{-1}.
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<double> means_;
    std::vector<double> weights_;
};

/// sum_k alpha_{k,d} (1 - e^{-x / lambda_k}); zero for x <= 0.
double hypoexp_cdf(double x, const HypoExpSpec& spec);

double hypoexp_sample(const HypoExpSpec& spec, Rng& rng);

/// lambda_1^{-1} (max of q iid hypoexponential draws - b_q^d).
double max_hypoexp_standardized(const HypoExpSpec& spec, std::int64_t q, Rng& rng);

/// Kolmogorov-Smirnov distance between a sample and a continuous cdf.
template <typename Cdf>
double ks_distance(std::vector<double> sample, Cdf&& cdf);

} // namespace fpt

#include <algorithm>

namespace fpt {

template <typename Cdf>
double ks_distance(std::vector<double> sample, Cdf&& cdf) {
    std::sort(sample.begin(), sample.end());
    const double m = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
    }
    return d;
}

} // namespace fpt
