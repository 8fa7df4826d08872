#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "fpt/error.hpp"
#include "fpt/model.hpp"
#include "fpt/simulate.hpp"
#include "oracles.hpp"

using namespace fpt;

namespace {

CoefSeries far1_series(const OperatorMatrix& rho, std::vector<double> eig, std::size_t n, std::uint64_t seed) {
    DgpSpec spec;
    spec.n = n;
    spec.rho = rho;
    spec.innovations = GaussianInnovations{std::move(eig)};
    spec.seed = seed;
    return gen_far1(spec).series;
}

} // namespace

TEST(LagAutocov, ConstantSeriesIsZero) {
    const CoefSeries x = CoefSeries::Constant(20, 3, 1.25);
    EXPECT_TRUE(lag_autocov(x, 0).isZero(1e-15));
    EXPECT_TRUE(lag_autocov(x, 1).isZero(1e-15));
}

TEST(LagAutocov, MatchesLoopOracle) {
    std::mt19937_64 rng(41);
    const CoefSeries x = oracle::gaussian_matrix(57, 4, rng);
    const Eigen::VectorXd mean = oracle::column_mean(x);
    const Eigen::MatrixXd c0 = oracle::cross_cov(x, x, mean);
    const Eigen::MatrixXd c1 = oracle::cross_cov(x.bottomRows(56), x.topRows(56), mean);
    EXPECT_LT((lag_autocov(x, 0) - c0).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((lag_autocov(x, 1) - c1).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GE(sym_eigen(lag_autocov(x, 0)).values.minCoeff(), -1e-10);
}

TEST(LagAutocov, WhiteNoise) {
    std::mt19937_64 rng(42);
    const CoefSeries x = oracle::gaussian_matrix(100000, 2, rng);
    EXPECT_LT((lag_autocov(x, 0) - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 0.02);
    EXPECT_LT(lag_autocov(x, 1).cwiseAbs().maxCoeff(), 0.02);
}

TEST(LagAutocov, Errors) {
    EXPECT_THROW(lag_autocov(CoefSeries::Zero(2, 2), 1), std::invalid_argument);
    EXPECT_THROW(lag_autocov(CoefSeries::Zero(10, 2), 2), std::invalid_argument);
}

TEST(EstimateFar1, IidDataGivesSmallOperator) {
    std::mt19937_64 rng(43);
    const CoefSeries x = oracle::gaussian_matrix(5000, 3, rng);
    EXPECT_LT(hs_norm(estimate_far1(x).rho_hat), 0.1);
}

TEST(EstimateFar1, RecoversKnownOperator) {
    const OperatorMatrix rho = 0.5 * OperatorMatrix::Identity(3, 3);
    const CoefSeries x = far1_series(rho, {1.0, 0.6, 0.3}, 5000, 44);
    const FarModel m = estimate_far1(x);
    EXPECT_LT(hs_norm(OperatorMatrix(m.rho_hat - rho)), 0.15);
    EXPECT_FALSE(m.nonstationary);
}

TEST(EstimateFar1, FullRankMatchesDenseSolve) {
    std::mt19937_64 rng(45);
    const CoefSeries x = oracle::gaussian_matrix(300, 5, rng);
    const Eigen::VectorXd mean = oracle::column_mean(x);
    const Eigen::MatrixXd c0 = oracle::cross_cov(x, x, mean);
    const Eigen::MatrixXd c1 = oracle::cross_cov(x.bottomRows(299), x.topRows(299), mean);
    const Eigen::MatrixXd expected = c0.transpose().partialPivLu().solve(c1.transpose()).transpose();
    const FarModel m = estimate_far1(x, ComponentRule::fixed(5));
    EXPECT_EQ(m.k_used, 5u);
    EXPECT_NEAR(m.explained_variance, 1.0, 1e-12);
    EXPECT_LT((m.rho_hat - expected).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(EstimateFar1, ThresholdPicksSmallestSufficientK) {
    const CoefSeries x = far1_series(OperatorMatrix::Zero(4, 4), {10.0, 1.0, 0.01, 0.001}, 20000, 46);
    EXPECT_EQ(estimate_far1(x, ComponentRule::share(0.8)).k_used, 1u);
    EXPECT_EQ(estimate_far1(x, ComponentRule::share(0.95)).k_used, 2u);
    EXPECT_EQ(estimate_far1(x, ComponentRule::share(0.9995)).k_used, 3u);
    double prev = 0.0;
    for (std::size_t k = 1; k <= 4; ++k) {
        const double ev = estimate_far1(x, ComponentRule::fixed(k)).explained_variance;
        EXPECT_GE(ev, prev);
        prev = ev;
    }
}

TEST(EstimateFar1, ScaleEquivariant) {
    OperatorMatrix rho(3, 3);
    rho << 0.4, 0.1, 0.0, 0.0, 0.3, 0.1, 0.05, 0.0, 0.2;
    const CoefSeries x = far1_series(rho, {1.0, 0.5, 0.25}, 800, 47);
    const OperatorMatrix a = estimate_far1(x).rho_hat;
    for (double c : {0.01, 7.0, 1000.0}) {
        EXPECT_LT((estimate_far1(c * x).rho_hat - a).cwiseAbs().maxCoeff(), 1e-10) << "c=" << c;
    }
}

TEST(EstimateFar1, RankDeficientAndInvalid) {
    std::mt19937_64 rng(48);
    CoefSeries x = CoefSeries::Zero(100, 3);
    x.leftCols(2) = oracle::gaussian_matrix(100, 2, rng);
    EXPECT_THROW(estimate_far1(x, ComponentRule::fixed(3)), NumericalError);
    EXPECT_NO_THROW(estimate_far1(x, ComponentRule::fixed(2)));
    EXPECT_THROW(estimate_far1(x, ComponentRule::fixed(4)), std::invalid_argument);
    EXPECT_THROW(estimate_far1(x, ComponentRule::share(1.5)), std::invalid_argument);
    EXPECT_THROW(estimate_far1(CoefSeries::Zero(2, 3)), std::invalid_argument);
}

TEST(EstimateFar1, ShrinksWithSampleSizeOnIidData) {
    double small = 0.0, large = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        small += hs_norm(estimate_far1(far1_series(OperatorMatrix::Zero(3, 3), {1, 0.5, 0.2}, 200, s)).rho_hat);
        large += hs_norm(estimate_far1(far1_series(OperatorMatrix::Zero(3, 3), {1, 0.5, 0.2}, 5000, s)).rho_hat);
    }
    EXPECT_LT(large, small);
}

TEST(Residuals, ZeroOperatorShiftsCenteredSeries) {
    std::mt19937_64 rng(49);
    const CoefSeries x = oracle::gaussian_matrix(30, 2, rng);
    const FarModel m = FarModel::zero(x);
    const CoefSeries r = residuals(x, m);
    ASSERT_EQ(r.rows(), 29);
    const CoefSeries centered = x.rowwise() - m.mean.transpose();
    EXPECT_LT((r - centered.bottomRows(29)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Residuals, NoiselessRecursionGivesZero) {
    OperatorMatrix rho(2, 2);
    rho << 0.5, 0.2, -0.1, 0.3;
    CoefSeries x(25, 2);
    x.row(0) << 1.0, -2.0;
    for (Eigen::Index t = 1; t < 25; ++t) {
        x.row(t) = (rho * x.row(t - 1).transpose()).transpose();
    }
    FarModel m;
    m.rho_hat = rho;
    m.mean = CoefVector::Zero(2);
    EXPECT_LT(residuals(x, m).cwiseAbs().maxCoeff(), 1e-15);
    m.mean = CoefVector::Zero(3);
    EXPECT_THROW(residuals(x, m), std::invalid_argument);
}

TEST(Residuals, WhiteAfterEstimation) {
    OperatorMatrix rho(3, 3);
    rho << 0.5, 0.2, 0.0, 0.0, 0.4, 0.1, 0.0, 0.0, 0.3;
    const CoefSeries x = far1_series(rho, {1.0, 0.5, 0.25}, 5000, 50);
    const CoefSeries r = residuals(x, estimate_far1(x));
    EXPECT_LT(hs_norm(lag_autocov(r, 1)), 0.05);
}

TEST(InnovationCov, RepeatedResidualIsRankOne) {
    CoefSeries r(9, 3);
    for (Eigen::Index t = 0; t < 9; ++t) {
        r.row(t) << 1.0, 2.0, -2.0;
    }
    const InnovationCov c = innovation_cov(r);
    EXPECT_NEAR(c.eigen.values(0), 9.0, 1e-12);
    EXPECT_NEAR(c.eigen.values(1), 0.0, 1e-12);
    EXPECT_NEAR(c.eigen.values(2), 0.0, 1e-12);
}

TEST(InnovationCov, TraceIsMeanSquaredNorm) {
    std::mt19937_64 rng(51);
    const CoefSeries r = oracle::gaussian_matrix(77, 4, rng);
    const InnovationCov c = innovation_cov(r);
    EXPECT_NEAR(c.sigma_hat.trace(), r.rowwise().squaredNorm().mean(), 1e-10);
    EXPECT_NEAR(c.eigen.values.sum(), c.sigma_hat.trace(), 1e-10);
    for (Eigen::Index k = 1; k < 4; ++k) {
        EXPECT_GE(c.eigen.values(k - 1), c.eigen.values(k));
        EXPECT_GE(c.eigen.values(k), 0.0);
    }
}

TEST(InnovationCov, RecoversDiagonalCovariance) {
    const CoefSeries e = far1_series(OperatorMatrix::Zero(2, 2), {2.0, 1.0}, 100000, 52);
    const InnovationCov c = innovation_cov(e);
    EXPECT_NEAR(c.eigen.values(0), 2.0, 0.05);
    EXPECT_NEAR(c.eigen.values(1), 1.0, 0.05);
}

TEST(SelectAn, Examples) {
    EXPECT_EQ(select_a_n(std::vector<double>{1.0, 0.5, 0.009, 0.001}), 3u);
    EXPECT_EQ(select_a_n(std::vector<double>{1.0, 0.0}), 2u);
    EXPECT_EQ(select_a_n(std::vector<double>{1.0}), 1u);
    EXPECT_EQ(select_a_n(std::vector<double>{1.0, 0.9, 0.8}), 3u);
    EXPECT_THROW(select_a_n(std::vector<double>{0.0, 0.0}), NumericalError);
}

TEST(SelectAn, MonotoneInThreshold) {
    const std::vector<double> l{1.0, 0.7, 0.2, 0.05, 0.012, 0.004, 0.0005};
    std::size_t prev = select_a_n(l, 1e-4);
    for (double thr = 1e-4; thr < 1.0; thr *= 1.5) {
        const std::size_t a = select_a_n(l, thr);
        EXPECT_LE(a, prev);
        prev = a;
    }
}

TEST(TransferOperator, IdentityAndZero) {
    const std::vector<std::pair<int, OperatorMatrix>> id{{0, OperatorMatrix::Identity(3, 3)}};
    const std::vector<std::pair<int, OperatorMatrix>> zero{{0, OperatorMatrix::Zero(3, 3)},
                                                          {1, OperatorMatrix::Zero(3, 3)}};
    for (double w : {0.1, 1.0, 3.0}) {
        EXPECT_LT((transfer_operator(id, w) - ComplexOperatorMatrix::Identity(3, 3)).norm(), 1e-15);
        EXPECT_TRUE(transfer_operator(zero, w).isZero(0.0));
    }
}

TEST(TransferOperator, NeumannSeriesInvertsFar1Filter) {
    std::mt19937_64 rng(53);
    OperatorMatrix rho = oracle::gaussian_matrix(4, 4, rng);
    rho *= 0.5 / operator_norm(rho);
    std::vector<std::pair<int, OperatorMatrix>> lags;
    OperatorMatrix power = OperatorMatrix::Identity(4, 4);
    for (int k = 0; k <= 50; ++k) {
        lags.emplace_back(k, power);
        power = power * rho;
    }
    const FrequencyGrid grid = fundamental_frequencies(21);
    const auto filters = far1_inverse_filters(rho, grid);
    for (std::size_t j = 0; j < grid.q; ++j) {
        const ComplexOperatorMatrix a = transfer_operator(lags, grid.omegas[j]);
        const ComplexOperatorMatrix exact = filters[j].inverse();
        EXPECT_LT((a - exact).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((filters[j] * a - ComplexOperatorMatrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Far1InverseFilters, HalfIdentityAtQuarterTurn) {
    const FrequencyGrid grid = fundamental_frequencies(8); // w_2 = pi/2
    const auto f = far1_inverse_filters(0.5 * OperatorMatrix::Identity(2, 2), grid);
    ASSERT_EQ(f.size(), 3u);
    const ComplexOperatorMatrix expected = Complex(1.0, 0.5) * ComplexOperatorMatrix::Identity(2, 2);
    EXPECT_LT((f[1] - expected).cwiseAbs().maxCoeff(), 1e-15);
    for (const auto& g : far1_inverse_filters(OperatorMatrix::Zero(2, 2), grid)) {
        EXPECT_EQ((g - ComplexOperatorMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0);
    }
}
