#include "fpt/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fpt/error.hpp"

namespace fpt {

namespace {

void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

void require_square(const Eigen::MatrixXd& s, const char* what) {
    if (s.rows() != s.cols() || s.rows() == 0) {
        throw std::invalid_argument(std::string(what) + ": operator must be a nonempty square matrix");
    }
}

} // namespace

Complex complex_inner(const ComplexCoefVector& u, const ComplexCoefVector& v) {
    require_same_size(u.size(), v.size(), "complex_inner");
    // Eigen's dot() conjugates its first argument.
    return v.dot(u);
}

ComplexOperatorMatrix tensor(const ComplexCoefVector& x, const ComplexCoefVector& y) {
    require_same_size(x.size(), y.size(), "tensor");
    return x * y.adjoint();
}

double hs_norm(const ComplexOperatorMatrix& a) { return a.norm(); }

double hs_norm(const OperatorMatrix& a) { return a.norm(); }

double operator_norm(const OperatorMatrix& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues()(0);
}

bool is_symmetric(const OperatorMatrix& s, double tol) {
    if (s.rows() != s.cols()) {
        return false;
    }
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    return (s - s.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

EigenSystem sym_eigen(const OperatorMatrix& s) {
    require_square(s, "sym_eigen");
    if (!is_symmetric(s)) {
        throw std::invalid_argument("sym_eigen: operator is not symmetric");
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("sym_eigen: eigensolver did not converge");
    }

    const Eigen::Index p = s.rows();
    EigenSystem out;
    out.values.resize(p);
    out.vectors.resize(p, p);
    // Eigen returns ascending order.
    for (Eigen::Index k = 0; k < p; ++k) {
        out.values(k) = solver.eigenvalues()(p - 1 - k);
        out.vectors.col(k) = solver.eigenvectors().col(p - 1 - k);
    }

    const double top = std::max(1.0, std::abs(out.values(0)));
    for (Eigen::Index k = 0; k < p; ++k) {
        double& v = out.values(k);
        if (std::abs(v) <= 1e-12) {
            v = 0.0;
        } else if (v < -1e-8 * top) {
            throw NumericalError("sym_eigen: operator has a negative eigenvalue " + std::to_string(v));
        } else if (v < 0.0) {
            v = 0.0;
        }

        auto col = out.vectors.col(k);
        for (Eigen::Index i = 0; i < p; ++i) {
            if (std::abs(col(i)) > 1e-12) {
                if (col(i) < 0.0) {
                    col = -col;
                }
                break;
            }
        }
    }
    return out;
}

OperatorMatrix inv_sqrt(const OperatorMatrix& s, double eps) {
    require_square(s, "inv_sqrt");
    if (!is_symmetric(s)) {
        throw std::invalid_argument("inv_sqrt: operator is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("inv_sqrt: eigensolver did not converge");
    }
    const Eigen::VectorXd& lambda = solver.eigenvalues();
    if (lambda.minCoeff() <= eps) {
        throw NumericalError("inv_sqrt: operator is rank deficient (smallest eigenvalue " +
                             std::to_string(lambda.minCoeff()) + ")");
    }
    const Eigen::MatrixXd& v = solver.eigenvectors();
    OperatorMatrix r = v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
    return 0.5 * (r + r.transpose());
}

} // namespace fpt
