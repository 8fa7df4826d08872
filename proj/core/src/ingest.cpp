#include "fpt/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include <json.hpp>

#include "fpt/distributions.hpp"
#include "fpt/error.hpp"

namespace fpt {

namespace {

using Table = std::vector<std::vector<double>>;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
    cell = trim(cell);
    double value = 0.0;
    const char* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw DataError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                        ": not a finite number: '" + std::string(cell) + "'");
    }
    return value;
}

Table read_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    Table rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
            line.erase(0, 3);
        }
        std::vector<double> row;
        std::string_view rest(line);
        std::size_t col = 1;
        while (true) {
            const auto comma = rest.find(',');
            row.push_back(parse_cell(rest.substr(0, comma), lineno, col));
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
            ++col;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw DataError("row " + std::to_string(lineno) + ": expected " + std::to_string(rows.front().size()) +
                            " columns, found " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw DataError(path.string() + ": empty file");
    }
    return rows;
}

bool looks_like_grid(const std::vector<double>& row) {
    bool fractional = false;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] < 0.0 || row[i] > 1.0) {
            return false;
        }
        if (i > 0 && !(row[i] > row[i - 1])) {
            return false;
        }
        fractional = fractional || (row[i] != std::floor(row[i]));
    }
    return fractional;
}

Eigen::MatrixXd to_matrix(const Table& rows, std::size_t first) {
    const std::size_t n = rows.size() - first;
    const std::size_t m = rows.front().size();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[first + i][j];
        }
    }
    return out;
}

// Shortest representation that round-trips exactly.
std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

nlohmann::json to_json(const TestReport& r) {
    nlohmann::json j;
    j["t_n"] = r.t_n;
    j["p_value"] = r.p_value;
    j["reject"] = r.reject;
    j["alpha"] = r.alpha;
    j["critical_value"] = r.critical_value;
    j["a_n"] = r.a_n;
    j["argmax_j"] = r.argmax_j;
    j["implied_period"] = r.implied_period;
    j["n"] = r.n;
    j["q"] = r.q;
    j["lambda_hats"] = r.lambda_hats;
    j["per_freq"] = r.per_freq;
    j["rho_norm"] = r.rho_norm;
    j["k_used"] = r.k_used;
    j["centering"] = r.centering;
    j["warnings"] = r.warnings;
    return j;
}

} // namespace

void BasisSpec::validate() const {
    if (size < 1 || size % 2 == 0) {
        throw std::invalid_argument("basis size must be a positive odd integer, got " + std::to_string(size));
    }
}

GridSeries read_grid_csv(const std::filesystem::path& path, HeaderMode header) {
    const Table rows = read_table(path);
    const std::size_t m = rows.front().size();
    if (m < 2) {
        throw DataError(path.string() + ": need at least 2 grid points per curve");
    }

    bool has_header = header == HeaderMode::present;
    if (header == HeaderMode::automatic) {
        has_header = rows.size() > 1 && looks_like_grid(rows.front());
    }
    if (has_header && !(rows.front().front() >= 0.0 && rows.front().back() <= 1.0)) {
        throw DataError("row 1: header grid must lie inside [0,1]");
    }
    if (has_header && rows.size() < 2) {
        throw DataError(path.string() + ": header without data rows");
    }

    GridSeries out;
    out.values = to_matrix(rows, has_header ? 1 : 0);
    out.grid.resize(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) {
        out.grid(static_cast<Eigen::Index>(i)) =
            has_header ? rows.front()[i] : static_cast<double>(i) / static_cast<double>(m);
    }
    for (Eigen::Index i = 1; i < out.grid.size(); ++i) {
        if (!(out.grid(i) > out.grid(i - 1))) {
            throw DataError("row 1: grid points must be strictly increasing");
        }
    }
    return out;
}

Eigen::MatrixXd basis_matrix(const Eigen::VectorXd& grid, const BasisSpec& basis) {
    basis.validate();
    const auto p = static_cast<Eigen::Index>(basis.size);
    Eigen::MatrixXd phi(grid.size(), p);
    const double root2 = std::numbers::sqrt2;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double u = grid(i);
        phi(i, 0) = 1.0;
        for (Eigen::Index k = 1; 2 * k < p; ++k) {
            const double arg = 2.0 * std::numbers::pi * static_cast<double>(k) * u;
            phi(i, 2 * k - 1) = root2 * std::sin(arg);
            phi(i, 2 * k) = root2 * std::cos(arg);
        }
    }
    return phi;
}

CoefSeries fit_basis(const GridSeries& data, const BasisSpec& basis) {
    basis.validate();
    const Eigen::Index m = data.grid.size();
    if (data.values.cols() != m) {
        throw DataError("fit_basis: curves have " + std::to_string(data.values.cols()) + " points but grid has " +
                        std::to_string(m));
    }
    if (m < static_cast<Eigen::Index>(basis.size)) {
        throw DataError("fit_basis: " + std::to_string(m) + " grid points cannot determine " +
                        std::to_string(basis.size) + " coefficients");
    }
    const Eigen::MatrixXd phi = basis_matrix(data.grid, basis);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(phi);
    qr.setThreshold(1e-10);
    if (qr.rank() < phi.cols()) {
        throw NumericalError("fit_basis: grid too coarse for " + std::to_string(basis.size) +
                             " basis functions (collinear design)");
    }
    // Solve phi * C^T = values^T for all curves at once.
    return qr.solve(data.values.transpose()).transpose();
}

CoefSeries read_coef_csv(const std::filesystem::path& path) { return to_matrix(read_table(path), 0); }

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw DataError("cannot open " + path.string() + " for writing");
    }
    out << content;
    if (!out) {
        throw DataError("failed writing " + path.string());
    }
}

void write_coef_csv(const CoefSeries& series, const std::filesystem::path& path) {
    std::ostringstream os;
    for (Eigen::Index t = 0; t < series.rows(); ++t) {
        for (Eigen::Index k = 0; k < series.cols(); ++k) {
            if (k > 0) {
                os << ',';
            }
            os << format_double(series(t, k));
        }
        os << '\n';
    }
    write_text(path, os.str());
}

std::string report_json(const TestReport& report) { return to_json(report).dump(2) + "\n"; }

std::string report_json(const McResult& result) {
    nlohmann::json j;
    j["replications"] = result.replications;
    j["failures"] = result.failures;
    nlohmann::json levels = nlohmann::json::array();
    for (std::size_t i = 0; i < result.alphas.size(); ++i) {
        levels.push_back({{"alpha", result.alphas[i]},
                          {"rejections", result.rejections[i]},
                          {"rejection_rate", result.rates[i]},
                          {"standard_error", result.standard_errors[i]}});
    }
    j["per_alpha"] = std::move(levels);
    return j.dump(2) + "\n";
}

std::string spectrum_csv(const TestReport& report, const std::vector<double>& alphas) {
    std::ostringstream os;
    os << "j,omega,t_n_j";
    for (double a : alphas) {
        os << ",critical_" << format_double(a);
    }
    os << '\n';
    std::vector<double> crit;
    for (double a : alphas) {
        crit.push_back(gumbel_quantile(1.0 - a));
    }
    for (const SpectrumRow& row : spectrum_rows(report)) {
        os << row.j << ',' << format_double(row.omega) << ',' << format_double(row.t_n_j);
        for (double c : crit) {
            os << ',' << format_double(c);
        }
        os << '\n';
    }
    return os.str();
}

std::string mc_csv(const McResult& result) {
    std::ostringstream os;
    os << "alpha,replications,failures,rejections,rejection_rate,standard_error\n";
    for (std::size_t i = 0; i < result.alphas.size(); ++i) {
        os << format_double(result.alphas[i]) << ',' << result.replications << ',' << result.failures << ','
           << result.rejections[i] << ',' << format_double(result.rates[i]) << ','
           << format_double(result.standard_errors[i]) << '\n';
    }
    return os.str();
}

void write_report(const TestReport& report, const std::filesystem::path& path, ReportFormat format) {
    write_text(path, format == ReportFormat::json ? report_json(report) : spectrum_csv(report));
}

void write_report(const McResult& result, const std::filesystem::path& path, ReportFormat format) {
    write_text(path, format == ReportFormat::json ? report_json(result) : mc_csv(result));
}

} // namespace fpt
