#include "fpt/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <type_traits>

namespace fpt {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t kNoiseStream = 0;
constexpr std::uint64_t kPeriodStream = 1;

struct InnovationDrawer {
    Rng& rng;
    std::size_t count;

    CoefSeries operator()(const GaussianInnovations& g) const {
        const auto p = static_cast<Eigen::Index>(g.eigenvalues.size());
        Eigen::VectorXd sd(p);
        for (Eigen::Index k = 0; k < p; ++k) {
            sd(k) = std::sqrt(g.eigenvalues[static_cast<std::size_t>(k)]);
        }
        std::normal_distribution<double> normal(0.0, 1.0);
        CoefSeries e(static_cast<Eigen::Index>(count), p);
        for (Eigen::Index t = 0; t < e.rows(); ++t) {
            for (Eigen::Index k = 0; k < p; ++k) {
                e(t, k) = sd(k) * normal(rng);
            }
        }
        return e;
    }

    CoefSeries operator()(const BootstrapPool& b) const { return bootstrap_innovations(b.pool, count, rng); }
};

} // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

std::size_t DgpSpec::dim() const {
    return std::visit(
        [](const auto& src) -> std::size_t {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, GaussianInnovations>) {
                return src.eigenvalues.size();
            } else {
                return static_cast<std::size_t>(src.pool.cols());
            }
        },
        innovations);
}

void DgpSpec::validate() const {
    if (n < 1) {
        throw std::invalid_argument("DgpSpec: n must be positive");
    }
    const std::size_t p = dim();
    if (p == 0) {
        throw std::invalid_argument("DgpSpec: innovation source has dimension 0");
    }
    if (const auto* g = std::get_if<GaussianInnovations>(&innovations)) {
        for (double l : g->eigenvalues) {
            if (!(l > 0.0)) {
                throw std::invalid_argument("DgpSpec: gaussian eigenvalues must be positive");
            }
        }
    } else if (std::get<BootstrapPool>(innovations).pool.rows() == 0) {
        throw std::invalid_argument("DgpSpec: bootstrap pool is empty");
    }
    if (static_cast<std::size_t>(rho.rows()) != p || static_cast<std::size_t>(rho.cols()) != p) {
        throw std::invalid_argument("DgpSpec: rho must be " + std::to_string(p) + "x" + std::to_string(p));
    }
    if (signal) {
        if (!(signal->amplitude >= 0.0)) {
            throw std::invalid_argument("SignalSpec: amplitude must be >= 0");
        }
        if (const int* d = std::get_if<int>(&signal->period); d && *d < 2) {
            throw std::invalid_argument("SignalSpec: period must be >= 2");
        }
        if (const auto* pl = std::get_if<PoissonPeriod>(&signal->period); pl && !(pl->lambda > 0.0)) {
            throw std::invalid_argument("SignalSpec: poisson lambda must be positive");
        }
        if (signal->direction) {
            if (static_cast<std::size_t>(signal->direction->size()) != p) {
                throw std::invalid_argument("SignalSpec: direction dimension mismatch");
            }
            if (!(signal->direction->norm() > 0.0)) {
                throw std::invalid_argument("SignalSpec: direction must be nonzero");
            }
        }
    }
}

int draw_period(double poisson_lambda, Rng& rng) {
    if (!(poisson_lambda > 0.0)) {
        throw std::invalid_argument("draw_period: lambda must be positive");
    }
    std::poisson_distribution<int> poisson(poisson_lambda);
    return 2 + poisson(rng);
}

CoefSeries bootstrap_innovations(const CoefSeries& pool, std::size_t count, Rng& rng) {
    if (pool.rows() == 0) {
        throw std::invalid_argument("bootstrap_innovations: empty pool");
    }
    std::uniform_int_distribution<Eigen::Index> pick(0, pool.rows() - 1);
    CoefSeries out(static_cast<Eigen::Index>(count), pool.cols());
    for (Eigen::Index t = 0; t < out.rows(); ++t) {
        out.row(t) = pool.row(pick(rng));
    }
    return out;
}

Realization gen_far1(const DgpSpec& spec) {
    spec.validate();
    const auto n = static_cast<Eigen::Index>(spec.n);
    const auto p = static_cast<Eigen::Index>(spec.dim());

    Realization out;
    if (operator_norm(spec.rho) >= 1.0) {
        out.warnings.emplace_back("rho has operator norm >= 1; the process may not be stationary");
    }

    Rng noise_rng(derive_seed(spec.seed, kNoiseStream));
    const CoefSeries eps = std::visit(InnovationDrawer{noise_rng, spec.n + 1}, spec.innovations);

    out.series.resize(n, p);
    Eigen::VectorXd prev = eps.row(0).transpose();
    for (Eigen::Index t = 0; t < n; ++t) {
        Eigen::VectorXd next = spec.rho * prev + eps.row(t + 1).transpose();
        out.series.row(t) = next.transpose();
        prev = std::move(next);
    }

    if (spec.signal) {
        const SignalSpec& s = *spec.signal;
        if (const int* d = std::get_if<int>(&s.period)) {
            out.period = *d;
        } else {
            Rng period_rng(derive_seed(spec.seed, kPeriodStream));
            out.period = draw_period(std::get<PoissonPeriod>(s.period).lambda, period_rng);
        }
        CoefVector dir = CoefVector::Unit(p, 0);
        if (s.direction) {
            dir = *s.direction / s.direction->norm();
        }
        if (s.amplitude > 0.0) {
            const double step = 2.0 * std::numbers::pi / static_cast<double>(out.period);
            for (Eigen::Index t = 0; t < n; ++t) {
                const double st = s.amplitude * std::cos(step * static_cast<double>(t + 1));
                out.series.row(t) += st * dir.transpose();
            }
        }
    }
    return out;
}

double signal_energy(double amplitude, int period) {
    if (period < 2) {
        throw std::invalid_argument("signal_energy: period must be >= 2");
    }
    double sum = 0.0;
    const double step = 2.0 * std::numbers::pi / static_cast<double>(period);
    for (int t = 1; t <= period; ++t) {
        const double c = std::cos(step * t);
        sum += c * c;
    }
    return amplitude * amplitude * sum / period;
}

OperatorMatrix stationary_covariance(const OperatorMatrix& rho, const OperatorMatrix& sigma) {
    if (rho.rows() != sigma.rows() || rho.rows() != rho.cols() || sigma.rows() != sigma.cols()) {
        throw std::invalid_argument("stationary_covariance: dimension mismatch");
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXd> es(rho);
    if (es.eigenvalues().cwiseAbs().maxCoeff() >= 1.0) {
        throw std::invalid_argument("stationary_covariance: rho has spectral radius >= 1");
    }
    // Doubling: C_{k+1} = C_k + R_k C_k R_k^T, R_{k+1} = R_k^2.
    OperatorMatrix c = sigma;
    OperatorMatrix r = rho;
    for (int it = 0; it < 200; ++it) {
        const OperatorMatrix inc = r * c * r.transpose();
        c += inc;
        r = r * r;
        if (inc.norm() <= 1e-15 * c.norm()) {
            break;
        }
    }
    return 0.5 * (c + c.transpose());
}

OperatorMatrix innovation_covariance(const InnovationSource& source) {
    if (const auto* g = std::get_if<GaussianInnovations>(&source)) {
        return Eigen::Map<const Eigen::VectorXd>(g->eigenvalues.data(),
                                                 static_cast<Eigen::Index>(g->eigenvalues.size()))
            .asDiagonal();
    }
    const CoefSeries& pool = std::get<BootstrapPool>(source).pool;
    const CoefSeries x = pool.rowwise() - pool.colwise().mean();
    return x.transpose() * x / static_cast<double>(pool.rows());
}

McResult monte_carlo(const DgpSpec& dgp, const TestOptions& opts, std::size_t replications,
                     std::span<const double> alphas, unsigned threads) {
    if (replications < 1) {
        throw std::invalid_argument("monte_carlo: need at least one replication");
    }
    if (alphas.empty()) {
        throw std::invalid_argument("monte_carlo: no significance levels");
    }
    for (double a : alphas) {
        if (!(a > 0.0 && a < 1.0)) {
            throw std::invalid_argument("monte_carlo: alpha must lie in (0,1)");
        }
    }
    dgp.validate();
    opts.validate();

    McResult res;
    res.replications = replications;
    res.alphas.assign(alphas.begin(), alphas.end());
    res.statistics.assign(replications, std::numeric_limits<double>::quiet_NaN());
    res.periods.assign(replications, 0);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t r = next.fetch_add(1); r < replications; r = next.fetch_add(1)) {
            DgpSpec spec = dgp;
            spec.seed = derive_seed(dgp.seed, r);
            try {
                const Realization data = gen_far1(spec);
                res.periods[r] = data.period;
                res.statistics[r] = tn_test(data.series, opts).t_n;
            } catch (const std::exception&) {
                // Counted as a failure below via the NaN statistic.
            }
        }
    };

    unsigned count = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    count = static_cast<unsigned>(std::min<std::size_t>(count, replications));
    if (count <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(count);
        for (unsigned i = 0; i < count; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    std::vector<double> crit;
    for (double a : res.alphas) {
        crit.push_back(gumbel_quantile(1.0 - a));
    }
    res.rejections.assign(res.alphas.size(), 0);
    for (double t : res.statistics) {
        if (std::isnan(t)) {
            ++res.failures;
            continue;
        }
        for (std::size_t i = 0; i < crit.size(); ++i) {
            res.rejections[i] += t > crit[i] ? 1 : 0;
        }
    }
    if (res.failures * 100 > replications) {
        throw std::runtime_error("monte_carlo: " + std::to_string(res.failures) + " of " +
                                 std::to_string(replications) + " replications failed");
    }
    const double ok = static_cast<double>(replications - res.failures);
    for (std::size_t i = 0; i < crit.size(); ++i) {
        const double rate = ok > 0 ? static_cast<double>(res.rejections[i]) / ok : 0.0;
        res.rates.push_back(rate);
        res.standard_errors.push_back(ok > 0 ? std::sqrt(rate * (1.0 - rate) / ok) : 0.0);
    }
    return res;
}

} // namespace fpt
