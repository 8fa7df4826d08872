#pragma once

// File formats: discretised curves on a grid, fitted basis coefficients, and
// serialised test / Monte Carlo reports.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "fpt/hilbert.hpp"
#include "fpt/periodicity_test.hpp"
#include "fpt/simulate.hpp"
#include "fpt/spectral.hpp"

namespace fpt {

/// n curves sampled on m grid points in [0,1].
struct GridSeries {
    Eigen::MatrixXd values; ///< n x m
    Eigen::VectorXd grid;   ///< m points, strictly increasing
};

/// Orthonormal Fourier system on [0,1]: phi_1 = 1, phi_{2k} = sqrt(2) sin(2 pi k u),
/// phi_{2k+1} = sqrt(2) cos(2 pi k u). `size` must be odd.
struct BasisSpec {
    std::size_t size = 21;

    void validate() const;
};

enum class HeaderMode { automatic, present, absent };

/// Reads comma-separated curves, one per row in time order. A header row of
/// grid points is detected in automatic mode when the first row is strictly
/// increasing inside [0,1] and contains a non-integer; without one the grid is
/// u_i = i/m. Errors name the offending row and column.
GridSeries read_grid_csv(const std::filesystem::path& path, HeaderMode header = HeaderMode::automatic);

/// m x p design matrix of basis functions evaluated on `grid`.
Eigen::MatrixXd basis_matrix(const Eigen::VectorXd& grid, const BasisSpec& basis);

/// Least-squares coefficients of every curve. Throws DataError when m < p and
/// NumericalError when the design is collinear.
CoefSeries fit_basis(const GridSeries& data, const BasisSpec& basis);

/// Headerless n x p coefficient CSV.
CoefSeries read_coef_csv(const std::filesystem::path& path);
void write_coef_csv(const CoefSeries& series, const std::filesystem::path& path);

enum class ReportFormat { json, csv };

/// JSON holds every field with stable keys; CSV is the spectrum table
/// (j, omega, t_n_j).
void write_report(const TestReport& report, const std::filesystem::path& path, ReportFormat format);

/// JSON holds per-alpha rates and standard errors; CSV has one row per alpha.
void write_report(const McResult& result, const std::filesystem::path& path, ReportFormat format);

std::string report_json(const TestReport& report);
std::string report_json(const McResult& result);
std::string spectrum_csv(const TestReport& report, const std::vector<double>& alphas = {});
std::string mc_csv(const McResult& result);

/// Writes `content` to `path`, or to stdout when path is empty or "-".
void write_text(const std::filesystem::path& path, const std::string& content);

} // namespace fpt
