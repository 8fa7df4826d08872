#pragma once

// Data-generating processes and the Monte Carlo harness: FAR(1) noise driven
// by Gaussian or bootstrapped innovations, an optional cosine signal with a
// fixed or Poisson-distributed period, and empirical rejection rates.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fpt/distributions.hpp"
#include "fpt/hilbert.hpp"
#include "fpt/periodicity_test.hpp"
#include "fpt/spectral.hpp"

namespace fpt {

/// Independent N(0, lambda_k) coordinates in the working basis.
struct GaussianInnovations {
    std::vector<double> eigenvalues;
};

/// Rows resampled uniformly with replacement.
struct BootstrapPool {
    CoefSeries pool;
};

using InnovationSource = std::variant<GaussianInnovations, BootstrapPool>;

/// Period d = 2 + Poisson(lambda), redrawn for every realisation.
struct PoissonPeriod {
    double lambda = 5.0;
};

/// s(t) = amplitude * cos(2 pi t / d) * direction.
struct SignalSpec {
    double amplitude = 0.0;
    std::variant<int, PoissonPeriod> period = 7;
    std::optional<CoefVector> direction; ///< defaults to e_1; normalised to unit length
};

struct DgpSpec {
    std::size_t n = 0;
    OperatorMatrix rho;
    InnovationSource innovations;
    std::optional<SignalSpec> signal;
    std::uint64_t seed = 0;

    std::size_t dim() const;
    void validate() const;
};

struct Realization {
    CoefSeries series;
    int period = 0; ///< 0 when no signal was added
    std::vector<std::string> warnings;
};

/// Counter-based child seed; mixes (seed, stream) with splitmix64.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// X_0 = e_0, X_t = rho X_{t-1} + e_t, t = 1..n, plus the signal if present.
/// Innovations and the period draw use separate streams derived from
/// spec.seed, so adding a signal never changes the noise.
Realization gen_far1(const DgpSpec& spec);

/// 2 + Poisson(lambda). Throws std::invalid_argument for lambda <= 0.
int draw_period(double poisson_lambda, Rng& rng);

CoefSeries bootstrap_innovations(const CoefSeries& pool, std::size_t count, Rng& rng);

/// Mean over one period of ||s(t)||^2 for a unit direction.
double signal_energy(double amplitude, int period);

/// Covariance C of the stationary FAR(1) solution, C = rho C rho^T + sigma.
/// Throws std::invalid_argument if rho is not contractive.
OperatorMatrix stationary_covariance(const OperatorMatrix& rho, const OperatorMatrix& sigma);

/// Innovation covariance implied by a source (pool covariance is centred).
OperatorMatrix innovation_covariance(const InnovationSource& source);

struct McResult {
    std::size_t replications = 0; ///< requested
    std::size_t failures = 0;
    std::vector<double> alphas;
    std::vector<std::size_t> rejections;
    std::vector<double> rates;
    std::vector<double> standard_errors;
    std::vector<double> statistics; ///< t_n per replication, NaN on failure
    std::vector<int> periods;       ///< period per replication (0 without signal)
};

/// Runs `replications` independent copies of generate -> tn_test. Replication
/// r uses derive_seed(dgp.seed, r); results are reduced by index, so the
/// outcome does not depend on `threads` (0 = hardware concurrency). More than
/// 1% failed replications throws std::runtime_error.
McResult monte_carlo(const DgpSpec& dgp, const TestOptions& opts, std::size_t replications,
                     std::span<const double> alphas, unsigned threads = 0);

} // namespace fpt
