#include "fpt/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fpt {

namespace {

constexpr double kMinGap = 1e-8;

void check_decreasing(std::span<const double> values, std::size_t count, const char* what) {
    if (count == 0 || count > values.size()) {
        throw std::invalid_argument(std::string(what) + ": need 1 <= d <= " + std::to_string(values.size()));
    }
    if (!(values[0] > 0.0)) {
        throw std::invalid_argument(std::string(what) + ": leading eigenvalue must be positive");
    }
    for (std::size_t j = 1; j < count; ++j) {
        if (!(values[j] < values[j - 1])) {
            throw std::invalid_argument(std::string(what) + ": eigenvalues must be strictly decreasing");
        }
    }
}

} // namespace

double gumbel_cdf(double x) { return std::exp(-std::exp(-x)); }

double gumbel_sf(double x) { return -std::expm1(-std::exp(-x)); }

double gumbel_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("gumbel_quantile: probability must lie in (0,1)");
    }
    return -std::log(-std::log(p));
}

double centering_b(std::int64_t q, std::span<const double> eigenvalues, std::size_t d) {
    if (q < 1) {
        throw std::invalid_argument("centering_b: q must be >= 1");
    }
    check_decreasing(eigenvalues, d, "centering_b");
    const double lead = eigenvalues[0];
    double log_alpha = 0.0;
    for (std::size_t j = 1; j < d; ++j) {
        const double gap = 1.0 - eigenvalues[j] / lead;
        if (gap < kMinGap) {
            throw std::invalid_argument("centering_b: eigenvalue " + std::to_string(j + 1) +
                                        " is numerically tied with the leading eigenvalue");
        }
        log_alpha -= std::log1p(-eigenvalues[j] / lead);
    }
    return lead * (std::log(static_cast<double>(q)) + log_alpha);
}

double centering_b_limit(std::int64_t q, std::span<const double> eigenvalues, double tail_tol) {
    const std::size_t d = eigenvalues.size();
    check_decreasing(eigenvalues, d, "centering_b_limit");
    if (d >= 2) {
        const double lead = eigenvalues[0];
        const double bound = lead * eigenvalues[d - 1] / (lead - eigenvalues[1]);
        if (bound > tail_tol) {
            throw std::invalid_argument("centering_b_limit: eigenvalue tail not resolved (bound " +
                                        std::to_string(bound) + " > " + std::to_string(tail_tol) + ")");
        }
    }
    return centering_b(q, eigenvalues, d);
}

double centering_c(std::int64_t q, std::size_t d) {
    if (q < 3) {
        throw std::invalid_argument("centering_c: q must be >= 3");
    }
    if (d < 1) {
        throw std::invalid_argument("centering_c: d must be >= 1");
    }
    const double lq = std::log(static_cast<double>(q));
    const double dm1 = static_cast<double>(d - 1);
    return lq + dm1 * std::log(lq) - std::lgamma(dm1 + 1.0);
}

HypoExpSpec::HypoExpSpec(std::vector<double> means) : means_(std::move(means)) {
    check_decreasing(means_, means_.size(), "HypoExpSpec");
    if (!(means_.back() > 0.0)) {
        throw std::invalid_argument("HypoExpSpec: means must be positive");
    }
    // Products of many factors are accumulated as log-magnitude plus sign.
    const std::size_t d = means_.size();
    weights_.resize(d);
    for (std::size_t k = 0; k < d; ++k) {
        double log_mag = 0.0;
        bool negative = false;
        for (std::size_t j = 0; j < d; ++j) {
            if (j == k) {
                continue;
            }
            const double factor = 1.0 - means_[j] / means_[k];
            if (factor == 0.0) {
                throw std::invalid_argument("HypoExpSpec: repeated means");
            }
            log_mag -= std::log(std::abs(factor));
            negative ^= factor < 0.0;
        }
        weights_[k] = (negative ? -1.0 : 1.0) * std::exp(log_mag);
    }
}

double hypoexp_cdf(double x, const HypoExpSpec& spec) {
    if (x <= 0.0) {
        return 0.0;
    }
    const auto means = spec.means();
    const auto& w = spec.weights();
    // sum_k w_k = 1, so F(x) = -sum_k w_k expm1(-x/lambda_k) avoids the
    // constant term's cancellation near zero.
    double f = 0.0;
    for (std::size_t k = 0; k < means.size(); ++k) {
        f -= w[k] * std::expm1(-x / means[k]);
    }
    return std::clamp(f, 0.0, 1.0);
}

double hypoexp_sample(const HypoExpSpec& spec, Rng& rng) {
    double total = 0.0;
    for (double mean : spec.means()) {
        std::exponential_distribution<double> exp(1.0 / mean);
        total += exp(rng);
    }
    return total;
}

double max_hypoexp_standardized(const HypoExpSpec& spec, std::int64_t q, Rng& rng) {
    if (q < 1) {
        throw std::invalid_argument("max_hypoexp_standardized: q must be >= 1");
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < q; ++i) {
        best = std::max(best, hypoexp_sample(spec, rng));
    }
    const auto means = spec.means();
    return (best - centering_b(q, means, means.size())) / means[0];
}

} // namespace fpt
