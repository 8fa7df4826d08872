#include "fpt/spectral.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <unsupported/Eigen/FFT>

namespace fpt {

namespace {

void check_series(const CoefSeries& series) {
    if (series.rows() == 0 || series.cols() == 0) {
        throw std::invalid_argument("dft: empty series");
    }
}

// Column k of the result holds n^{-1/2} sum_{t=1}^n X_t[k] e^{-i t 2 pi j / n}
// for j = 0..n-1. The FFT indexes time from 0, hence the extra phase factor.
Eigen::MatrixXcd transform_columns(const CoefSeries& series) {
    const Eigen::Index n = series.rows();
    const Eigen::Index p = series.cols();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));

    std::vector<Complex> shift(static_cast<std::size_t>(n));
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        shift[static_cast<std::size_t>(j)] = scale * std::polar(1.0, -step * static_cast<double>(j));
    }

    Eigen::FFT<double> fft;
    Eigen::MatrixXcd out(n, p);
    std::vector<double> in(static_cast<std::size_t>(n));
    std::vector<Complex> spectrum;
    for (Eigen::Index k = 0; k < p; ++k) {
        for (Eigen::Index t = 0; t < n; ++t) {
            in[static_cast<std::size_t>(t)] = series(t, k);
        }
        fft.fwd(spectrum, in);
        for (Eigen::Index j = 0; j < n; ++j) {
            out(j, k) = shift[static_cast<std::size_t>(j)] * spectrum[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

} // namespace

FrequencyGrid fundamental_frequencies(std::size_t n) {
    if (n < 3) {
        throw std::invalid_argument("fundamental_frequencies: need n >= 3, got " + std::to_string(n));
    }
    FrequencyGrid grid;
    grid.n = n;
    grid.q = (n - 1) / 2;
    grid.omegas.reserve(grid.q);
    for (std::size_t j = 1; j <= grid.q; ++j) {
        grid.omegas.push_back(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
    }
    return grid;
}

ComplexCoefVector DftTable::row(std::size_t j) const {
    if (j < 1 || j > grid.q) {
        throw std::out_of_range("DftTable::row: frequency index " + std::to_string(j) + " outside 1.." +
                                std::to_string(grid.q));
    }
    return rows.row(static_cast<Eigen::Index>(j - 1)).transpose();
}

DftTable dft(const CoefSeries& series) {
    check_series(series);
    const auto n = static_cast<std::size_t>(series.rows());
    DftTable table;
    table.grid = fundamental_frequencies(n);

    const Eigen::MatrixXcd full = transform_columns(series);
    table.rows = full.middleRows(1, static_cast<Eigen::Index>(table.grid.q));
    return table;
}

Eigen::MatrixXcd full_dft(const CoefSeries& series) {
    check_series(series);
    return transform_columns(series);
}

std::vector<double> periodogram_norms(const DftTable& table) {
    std::vector<double> out(table.grid.q);
    for (std::size_t j = 0; j < table.grid.q; ++j) {
        out[j] = table.rows.row(static_cast<Eigen::Index>(j)).squaredNorm();
    }
    return out;
}

ComplexOperatorMatrix periodogram_operator(const DftTable& table, std::size_t j) {
    const ComplexCoefVector x = table.row(j);
    return tensor(x, x);
}

MaxResult max_norm(std::span<const double> norms, std::size_t n) {
    if (norms.empty()) {
        throw std::invalid_argument("max_norm: empty sequence");
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < norms.size(); ++j) {
        if (norms[j] > norms[best]) {
            best = j;
        }
    }
    MaxResult out;
    out.value = norms[best];
    out.argmax_j = best + 1;
    out.implied_period = static_cast<double>(n) / static_cast<double>(out.argmax_j);
    return out;
}

DftTable filter_dft(const DftTable& table, std::span<const ComplexOperatorMatrix> filters) {
    if (filters.size() != table.grid.q) {
        throw std::invalid_argument("filter_dft: expected " + std::to_string(table.grid.q) + " filters, got " +
                                    std::to_string(filters.size()));
    }
    const Eigen::Index p = table.rows.cols();
    DftTable out = table;
    for (std::size_t j = 0; j < filters.size(); ++j) {
        const auto& f = filters[j];
        if (f.rows() != p || f.cols() != p) {
            throw std::invalid_argument("filter_dft: filter " + std::to_string(j + 1) + " has wrong dimension");
        }
        const auto idx = static_cast<Eigen::Index>(j);
        out.rows.row(idx) = (f * table.rows.row(idx).transpose()).transpose();
    }
    return out;
}

} // namespace fpt
