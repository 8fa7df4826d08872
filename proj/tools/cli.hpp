#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpt/ingest.hpp"
#include "fpt/periodicity_test.hpp"
#include "fpt/simulate.hpp"

namespace fpt::cli {

enum class Command { test, spectrum, simulate, mvtest, generate };

/// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kDataError = 2;
inline constexpr int kNumericalError = 3;

struct CliConfig {
    Command command = Command::test;

    std::string input;
    std::string output; ///< empty = stdout
    std::optional<ReportFormat> format;
    std::optional<std::size_t> basis_size; ///< set => input is a grid CSV
    HeaderMode header = HeaderMode::automatic;
    bool sqrt_transform = false;

    NoiseModel noise_model = NoiseModel::far1;
    double variance_threshold = 0.99;
    std::optional<std::size_t> fixed_k;
    double a_n_threshold = 0.01;
    std::vector<double> alphas;

    std::uint64_t seed = 1;
    std::size_t replications = 2000;
    unsigned threads = 0;
    std::vector<std::size_t> ns;
    std::vector<double> rho_diag{0.0};
    double eigen_decay = 0.5;
    std::size_t dim = 8;
    std::string pool;
    std::vector<double> amplitudes;
    std::vector<int> periods;
    std::vector<double> poisson_lambdas;
};

/// Loads the input series, fitting the Fourier basis for grid CSVs.
CoefSeries load_series(const CliConfig& config);

/// Test options implied by the config; alpha is the first requested level.
TestOptions test_options(const CliConfig& config);

/// DGP template for simulate/generate, without signal and with the first n.
DgpSpec dgp_template(const CliConfig& config);

int cmd_test(const CliConfig& config);
int cmd_spectrum(const CliConfig& config);
int cmd_simulate(const CliConfig& config);
int cmd_mvtest(const CliConfig& config);
int cmd_generate(const CliConfig& config);

int dispatch(const CliConfig& config);

/// Parses argv and dispatches; parse errors return kDataError.
int run(int argc, const char* const* argv);

} // namespace fpt::cli
