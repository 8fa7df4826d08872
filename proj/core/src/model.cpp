#include "fpt/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fpt/error.hpp"

namespace fpt {

CoefVector sample_mean(const CoefSeries& series) {
    if (series.rows() == 0) {
        throw std::invalid_argument("sample_mean: empty series");
    }
    return series.colwise().mean().transpose();
}

CoefSeries center(const CoefSeries& series, const CoefVector& mean) {
    if (mean.size() != series.cols()) {
        throw std::invalid_argument("center: dimension mismatch");
    }
    return series.rowwise() - mean.transpose();
}

OperatorMatrix lag_autocov(const CoefSeries& series, int h) {
    if (h != 0 && h != 1) {
        throw std::invalid_argument("lag_autocov: lag must be 0 or 1");
    }
    const Eigen::Index n = series.rows();
    if (n <= h + 1) {
        throw std::invalid_argument("lag_autocov: series too short");
    }
    const CoefSeries x = center(series, sample_mean(series));
    const Eigen::Index m = n - h;
    OperatorMatrix c = x.bottomRows(m).transpose() * x.topRows(m) / static_cast<double>(m);
    if (h == 0) {
        c = 0.5 * (c + c.transpose());
    }
    return c;
}

FarModel FarModel::zero(const CoefSeries& series) {
    FarModel m;
    m.mean = sample_mean(series);
    m.rho_hat = OperatorMatrix::Zero(series.cols(), series.cols());
    return m;
}

FarModel estimate_far1(const CoefSeries& series, const ComponentRule& rule) {
    const Eigen::Index n = series.rows();
    const Eigen::Index p = series.cols();
    if (n < 3 || p < 1) {
        throw std::invalid_argument("estimate_far1: need at least 3 observations");
    }

    const OperatorMatrix c0 = lag_autocov(series, 0);
    const OperatorMatrix c1 = lag_autocov(series, 1);
    const EigenSystem eig = sym_eigen(c0);
    const double total = eig.trace();
    const double lead = eig.values(0);
    if (!(lead > 0.0)) {
        throw NumericalError("estimate_far1: series has zero variance");
    }

    std::size_t k = 0;
    if (rule.fixed_k) {
        k = *rule.fixed_k;
        if (k < 1 || k > static_cast<std::size_t>(p)) {
            throw std::invalid_argument("estimate_far1: fixed_k must lie in 1.." + std::to_string(p));
        }
    } else {
        const double threshold = rule.variance_threshold;
        if (!(threshold > 0.0 && threshold <= 1.0)) {
            throw std::invalid_argument("estimate_far1: variance threshold must lie in (0,1]");
        }
        double cum = 0.0;
        k = static_cast<std::size_t>(p);
        for (Eigen::Index i = 0; i < p; ++i) {
            cum += eig.values(i);
            if (cum >= (threshold - 1e-12) * total) {
                k = static_cast<std::size_t>(i + 1);
                break;
            }
        }
    }

    const auto kk = static_cast<Eigen::Index>(k);
    if (eig.values(kk - 1) <= 1e-12 * lead) {
        throw NumericalError("estimate_far1: C_0 is rank deficient within the " + std::to_string(k) +
                             " retained components");
    }
    const Eigen::MatrixXd v = eig.vectors.leftCols(kk);
    const Eigen::VectorXd inv = eig.values.head(kk).cwiseInverse();

    FarModel m;
    m.mean = sample_mean(series);
    m.rho_hat = c1 * v * inv.asDiagonal() * v.transpose();
    m.k_used = k;
    m.explained_variance = total > 0.0 ? eig.values.head(kk).sum() / total : 1.0;
    m.rho_norm = operator_norm(m.rho_hat);
    m.nonstationary = m.rho_norm >= 1.0;
    return m;
}

CoefSeries residuals(const CoefSeries& series, const FarModel& model) {
    const Eigen::Index n = series.rows();
    const Eigen::Index p = series.cols();
    if (model.rho_hat.rows() != p || model.rho_hat.cols() != p || model.mean.size() != p) {
        throw std::invalid_argument("residuals: model dimension does not match series");
    }
    if (n < 2) {
        throw std::invalid_argument("residuals: need at least 2 observations");
    }
    const CoefSeries x = center(series, model.mean);
    return x.bottomRows(n - 1) - x.topRows(n - 1) * model.rho_hat.transpose();
}

InnovationCov innovation_cov(const CoefSeries& resid) {
    if (resid.rows() < 2) {
        throw std::invalid_argument("innovation_cov: need at least 2 residuals");
    }
    InnovationCov out;
    out.sigma_hat = resid.transpose() * resid / static_cast<double>(resid.rows());
    out.sigma_hat = 0.5 * (out.sigma_hat + out.sigma_hat.transpose());
    out.eigen = sym_eigen(out.sigma_hat);
    return out;
}

std::size_t select_a_n(std::span<const double> lambda, double threshold) {
    if (lambda.empty() || !(lambda[0] > 0.0)) {
        throw NumericalError("select_a_n: leading eigenvalue must be positive");
    }
    for (std::size_t j = 1; j < lambda.size(); ++j) {
        const double ratio = std::max(lambda[j], 0.0) / lambda[0];
        if (ratio < 1.0 && -std::log1p(-ratio) <= threshold) {
            return j + 1;
        }
    }
    return lambda.size();
}

std::size_t select_a_n(const EigenSystem& eigen, double threshold) {
    return select_a_n(std::span<const double>(eigen.values.data(), eigen.size()), threshold);
}

ComplexOperatorMatrix transfer_operator(std::span<const std::pair<int, OperatorMatrix>> coeffs, double omega) {
    if (coeffs.empty()) {
        throw std::invalid_argument("transfer_operator: no coefficients");
    }
    const Eigen::Index p = coeffs.front().second.rows();
    ComplexOperatorMatrix a = ComplexOperatorMatrix::Zero(p, p);
    for (const auto& [lag, ak] : coeffs) {
        if (ak.rows() != p || ak.cols() != p) {
            throw std::invalid_argument("transfer_operator: coefficient dimension mismatch");
        }
        a += std::polar(1.0, -static_cast<double>(lag) * omega) * ak.cast<Complex>();
    }
    return a;
}

std::vector<ComplexOperatorMatrix> far1_inverse_filters(const OperatorMatrix& rho, const FrequencyGrid& grid) {
    if (rho.rows() != rho.cols()) {
        throw std::invalid_argument("far1_inverse_filters: rho must be square");
    }
    const ComplexOperatorMatrix eye = ComplexOperatorMatrix::Identity(rho.rows(), rho.cols());
    const ComplexOperatorMatrix r = rho.cast<Complex>();
    std::vector<ComplexOperatorMatrix> out;
    out.reserve(grid.q);
    for (double w : grid.omegas) {
        out.push_back(eye - std::polar(1.0, -w) * r);
    }
    return out;
}

ComplexOperatorMatrix spectral_density(const ComplexOperatorMatrix& transfer, const OperatorMatrix& sigma) {
    if (transfer.cols() != sigma.rows() || sigma.rows() != sigma.cols()) {
        throw std::invalid_argument("spectral_density: dimension mismatch");
    }
    return transfer * sigma.cast<Complex>() * transfer.adjoint();
}

} // namespace fpt
