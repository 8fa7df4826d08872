#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpt/error.hpp"

namespace fpt::cli {

namespace {

// Name of the pipeline step currently running, reported on failure.
thread_local std::string g_stage;

void stage(std::string name) { g_stage = std::move(name); }

std::vector<double> alphas_or_default(const CliConfig& c, std::vector<double> fallback) {
    return c.alphas.empty() ? fallback : c.alphas;
}

ReportFormat format_or(const CliConfig& c, ReportFormat fallback) { return c.format.value_or(fallback); }

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

int guarded(const char* name, const std::function<void()>& body) {
    stage("setup");
    try {
        body();
        return kOk;
    } catch (const NumericalError& e) {
        std::cerr << "fpt " << name << ": " << g_stage << " failed (numerical degeneracy): " << e.what() << '\n';
        return kNumericalError;
    } catch (const DataError& e) {
        std::cerr << "fpt " << name << ": " << g_stage << " failed (data error): " << e.what() << '\n';
        return kDataError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "fpt " << name << ": " << g_stage << " failed (invalid input): " << e.what() << '\n';
        return kDataError;
    } catch (const std::out_of_range& e) {
        std::cerr << "fpt " << name << ": " << g_stage << " failed (invalid input): " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "fpt " << name << ": " << g_stage << " failed: " << e.what() << '\n';
        return kNumericalError;
    }
}

std::vector<std::optional<SignalSpec>> signal_grid(const CliConfig& c) {
    if (!c.periods.empty() && !c.poisson_lambdas.empty()) {
        throw std::invalid_argument("--period and --poisson-lambda are mutually exclusive");
    }
    std::vector<std::optional<SignalSpec>> out;
    if (c.amplitudes.empty()) {
        out.emplace_back(std::nullopt);
        return out;
    }
    for (double a : c.amplitudes) {
        if (!(a >= 0.0)) {
            throw std::invalid_argument("--amplitude must be >= 0");
        }
        if (!c.poisson_lambdas.empty()) {
            for (double l : c.poisson_lambdas) {
                out.push_back(SignalSpec{a, PoissonPeriod{l}, std::nullopt});
            }
        } else if (!c.periods.empty()) {
            for (int d : c.periods) {
                out.push_back(SignalSpec{a, d, std::nullopt});
            }
        } else {
            throw std::invalid_argument("--amplitude needs --period or --poisson-lambda");
        }
    }
    return out;
}

std::string period_mode(const std::optional<SignalSpec>& s) {
    if (!s) {
        return "none";
    }
    return std::holds_alternative<int>(s->period) ? "fixed" : "poisson";
}

double period_param(const std::optional<SignalSpec>& s) {
    if (!s) {
        return 0.0;
    }
    if (const int* d = std::get_if<int>(&s->period)) {
        return *d;
    }
    return std::get<PoissonPeriod>(s->period).lambda;
}

} // namespace

CoefSeries load_series(const CliConfig& c) {
    stage("load");
    if (c.input.empty()) {
        throw DataError("--input is required");
    }
    if (!std::filesystem::exists(c.input)) {
        throw DataError("input file not found: " + c.input);
    }
    if (!c.basis_size) {
        if (c.sqrt_transform) {
            throw std::invalid_argument("--sqrt-transform applies to grid input (--basis-size)");
        }
        return read_coef_csv(c.input);
    }
    GridSeries grid = read_grid_csv(c.input, c.header);
    if (c.sqrt_transform) {
        if (grid.values.minCoeff() < 0.0) {
            throw DataError("--sqrt-transform: input contains negative values");
        }
        grid.values = grid.values.cwiseSqrt();
    }
    stage("fit_basis");
    return fit_basis(grid, BasisSpec{*c.basis_size});
}

TestOptions test_options(const CliConfig& c) {
    TestOptions o;
    o.noise_model = c.noise_model;
    o.components.variance_threshold = c.variance_threshold;
    o.components.fixed_k = c.fixed_k;
    o.a_n_threshold = c.a_n_threshold;
    o.alpha = c.alphas.empty() ? 0.05 : c.alphas.front();
    o.validate();
    return o;
}

DgpSpec dgp_template(const CliConfig& c) {
    DgpSpec spec;
    spec.seed = c.seed;
    spec.n = c.ns.empty() ? 500 : c.ns.front();
    if (!c.pool.empty()) {
        if (!std::filesystem::exists(c.pool)) {
            throw DataError("pool file not found: " + c.pool);
        }
        spec.innovations = BootstrapPool{read_coef_csv(c.pool)};
    } else {
        if (!(c.eigen_decay > 0.0 && c.eigen_decay < 1.0)) {
            throw std::invalid_argument("--eigen-decay must lie in (0,1)");
        }
        if (c.dim < 1) {
            throw std::invalid_argument("--dim must be >= 1");
        }
        GaussianInnovations g;
        for (std::size_t k = 1; k <= c.dim; ++k) {
            g.eigenvalues.push_back(std::pow(c.eigen_decay, static_cast<double>(k)));
        }
        spec.innovations = std::move(g);
    }
    const auto p = static_cast<Eigen::Index>(spec.dim());
    if (c.rho_diag.size() != 1 && c.rho_diag.size() != static_cast<std::size_t>(p)) {
        throw std::invalid_argument("--rho-diag needs 1 or " + std::to_string(p) + " entries, got " +
                                    std::to_string(c.rho_diag.size()));
    }
    spec.rho = OperatorMatrix::Zero(p, p);
    for (Eigen::Index k = 0; k < p; ++k) {
        spec.rho(k, k) = c.rho_diag.size() == 1 ? c.rho_diag.front() : c.rho_diag[static_cast<std::size_t>(k)];
    }
    return spec;
}

int cmd_test(const CliConfig& c) {
    return guarded("test", [&] {
        const CoefSeries series = load_series(c);
        const TestOptions opts = test_options(c);
        stage("tn_test");
        const TestReport report = tn_test(series, opts);
        stage("write_report");
        write_report(report, c.output, format_or(c, ReportFormat::json));
    });
}

int cmd_spectrum(const CliConfig& c) {
    return guarded("spectrum", [&] {
        const CoefSeries series = load_series(c);
        const TestOptions opts = test_options(c);
        const std::vector<double> alphas = alphas_or_default(c, {0.05});
        stage("tn_spectrum");
        const TestReport report = tn_test(series, opts);
        stage("write_report");
        if (format_or(c, ReportFormat::csv) == ReportFormat::csv) {
            write_text(c.output, spectrum_csv(report, alphas));
            return;
        }
        nlohmann::json j;
        j["n"] = report.n;
        j["q"] = report.q;
        j["t_n"] = report.t_n;
        j["argmax_j"] = report.argmax_j;
        j["implied_period"] = report.implied_period;
        nlohmann::json crit = nlohmann::json::array();
        for (double a : alphas) {
            crit.push_back({{"alpha", a}, {"value", gumbel_quantile(1.0 - a)}});
        }
        j["critical_values"] = std::move(crit);
        nlohmann::json rows = nlohmann::json::array();
        for (const SpectrumRow& r : spectrum_rows(report)) {
            rows.push_back({{"j", r.j}, {"omega", r.omega}, {"t_n_j", r.t_n_j}});
        }
        j["rows"] = std::move(rows);
        write_text(c.output, j.dump(2) + "\n");
    });
}

int cmd_mvtest(const CliConfig& c) {
    return guarded("mvtest", [&] {
        const CoefSeries series = load_series(c);
        const double alpha = c.alphas.empty() ? 0.05 : c.alphas.front();
        TestReport report;
        if (c.noise_model == NoiseModel::iid) {
            stage("mv_iid_test");
            report = mv_iid_test(series, alpha);
        } else {
            stage("estimate_far1");
            const FarModel model = estimate_far1(series, ComponentRule::fixed(static_cast<std::size_t>(series.cols())));
            const InnovationCov cov = innovation_cov(residuals(series, model));
            stage("mv_filtered_test");
            const auto filters = far1_inverse_filters(model.rho_hat, fundamental_frequencies(series.rows()));
            report = mv_filtered_test(center(series, model.mean), filters, cov.sigma_hat, alpha);
            report.rho_norm = model.rho_norm;
            report.k_used = model.k_used;
        }
        stage("write_report");
        write_report(report, c.output, format_or(c, ReportFormat::json));
    });
}

int cmd_generate(const CliConfig& c) {
    return guarded("generate", [&] {
        stage("dgp");
        DgpSpec spec = dgp_template(c);
        if (c.amplitudes.size() > 1 || c.periods.size() > 1 || c.poisson_lambdas.size() > 1) {
            throw std::invalid_argument("generate takes at most one --amplitude/--period/--poisson-lambda");
        }
        spec.signal = signal_grid(c).front();
        stage("gen_far1");
        const Realization data = gen_far1(spec);
        for (const auto& w : data.warnings) {
            std::cerr << "fpt generate: warning: " << w << '\n';
        }
        stage("write_series");
        write_coef_csv(data.series, c.output);
    });
}

int cmd_simulate(const CliConfig& c) {
    return guarded("simulate", [&] {
        stage("dgp");
        const DgpSpec base = dgp_template(c);
        const auto signals = signal_grid(c);
        const std::vector<std::size_t> ns = c.ns.empty() ? std::vector<std::size_t>{base.n} : c.ns;
        const std::vector<double> alphas = alphas_or_default(c, {0.1, 0.05, 0.01});
        TestOptions opts = test_options(c);

        struct Cell {
            std::size_t n;
            std::optional<SignalSpec> signal;
            McResult result;
        };
        std::vector<Cell> cells;
        for (std::size_t n : ns) {
            for (const auto& s : signals) {
                DgpSpec spec = base;
                spec.n = n;
                spec.signal = s;
                stage("monte_carlo(n=" + std::to_string(n) + ")");
                cells.push_back({n, s, monte_carlo(spec, opts, c.replications, alphas, c.threads)});
            }
        }

        stage("write_report");
        if (format_or(c, ReportFormat::csv) == ReportFormat::csv) {
            std::ostringstream os;
            os << "n,period_mode,period_param,amplitude,alpha,replications,failures,rejection_rate,standard_error\n";
            for (const Cell& cell : cells) {
                for (std::size_t i = 0; i < cell.result.alphas.size(); ++i) {
                    os << cell.n << ',' << period_mode(cell.signal) << ',' << format_number(period_param(cell.signal))
                       << ',' << format_number(cell.signal ? cell.signal->amplitude : 0.0) << ','
                       << format_number(cell.result.alphas[i]) << ',' << cell.result.replications << ','
                       << cell.result.failures << ',' << format_number(cell.result.rates[i]) << ','
                       << format_number(cell.result.standard_errors[i]) << '\n';
                }
            }
            write_text(c.output, os.str());
            return;
        }
        nlohmann::json out = nlohmann::json::array();
        for (const Cell& cell : cells) {
            nlohmann::json j = nlohmann::json::parse(report_json(cell.result));
            j["n"] = cell.n;
            j["period_mode"] = period_mode(cell.signal);
            j["period_param"] = period_param(cell.signal);
            j["amplitude"] = cell.signal ? cell.signal->amplitude : 0.0;
            j["seed"] = c.seed;
            out.push_back(std::move(j));
        }
        write_text(c.output, out.dump(2) + "\n");
    });
}

int dispatch(const CliConfig& c) {
    switch (c.command) {
    case Command::test:
        return cmd_test(c);
    case Command::spectrum:
        return cmd_spectrum(c);
    case Command::simulate:
        return cmd_simulate(c);
    case Command::mvtest:
        return cmd_mvtest(c);
    case Command::generate:
        return cmd_generate(c);
    }
    return kDataError;
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Detect periodic signals of unknown period in functional time series"};
    app.require_subcommand(1);
    CliConfig c;

    const std::map<std::string, NoiseModel> noise_map{{"iid", NoiseModel::iid}, {"far1", NoiseModel::far1}};
    const std::map<std::string, ReportFormat> format_map{{"json", ReportFormat::json}, {"csv", ReportFormat::csv}};
    const std::map<std::string, HeaderMode> header_map{
        {"auto", HeaderMode::automatic}, {"present", HeaderMode::present}, {"absent", HeaderMode::absent}};

    auto add_io = [&](CLI::App* sub) {
        sub->add_option("--input", c.input, "Coefficient CSV, or grid CSV together with --basis-size");
        sub->add_option("--output", c.output, "Output file (default: stdout)");
        sub->add_option("--format", c.format, "Output format")->transform(CLI::CheckedTransformer(format_map))->option_text("{json,csv}");
    };
    auto add_data = [&](CLI::App* sub) {
        sub->add_option("--basis-size", c.basis_size, "Fit this many Fourier basis functions to grid input");
        sub->add_option("--header", c.header, "Grid CSV header row")->transform(CLI::CheckedTransformer(header_map))->option_text("{auto,present,absent}");
        sub->add_flag("--sqrt-transform", c.sqrt_transform, "Square-root grid values before fitting");
    };
    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--noise-model", c.noise_model, "Noise model")->transform(CLI::CheckedTransformer(noise_map))->option_text("{far1,iid}");
        sub->add_option("--var-threshold", c.variance_threshold, "PCA variance share for the FAR(1) estimator");
        sub->add_option("--fixed-k", c.fixed_k, "Fixed number of principal components (overrides threshold)");
        sub->add_option("--an-threshold", c.a_n_threshold, "Truncation threshold for the a_n rule");
    };
    auto add_alpha = [&](CLI::App* sub) {
        sub->add_option("--alpha", c.alphas, "Significance level (repeatable)")->take_all()->allow_extra_args(false);
    };
    auto add_dgp = [&](CLI::App* sub) {
        sub->add_option("--seed", c.seed, "Random seed");
        sub->add_option("--n", c.ns, "Sample size (repeatable)")->take_all()->allow_extra_args(false);
        sub->add_option("--rho-diag", c.rho_diag, "Diagonal of rho: one value or one per coordinate")
            ->delimiter(',');
        sub->add_option("--eigen-decay", c.eigen_decay, "Gaussian innovation eigenvalues decay^k");
        sub->add_option("--dim", c.dim, "Dimension of Gaussian innovations");
        sub->add_option("--pool", c.pool, "Coefficient CSV of innovations to bootstrap");
        sub->add_option("--amplitude", c.amplitudes, "Signal amplitude (repeatable)")->take_all()->allow_extra_args(false);
        auto* period = sub->add_option("--period", c.periods, "Fixed signal period (repeatable)")
                           ->take_all()
                           ->allow_extra_args(false);
        auto* lambda = sub->add_option("--poisson-lambda", c.poisson_lambdas, "Period = 2 + Poisson(lambda)")
                           ->take_all()
                           ->allow_extra_args(false);
        period->excludes(lambda);
    };

    auto* test = app.add_subcommand("test", "Run the T_n test and write a report");
    add_io(test), add_data(test), add_model(test), add_alpha(test);
    test->callback([&] { c.command = Command::test; });

    auto* spectrum = app.add_subcommand("spectrum", "Write T_n(j) for every fundamental frequency");
    add_io(spectrum), add_data(spectrum), add_model(spectrum), add_alpha(spectrum);
    spectrum->callback([&] { c.command = Command::spectrum; });

    auto* mvtest = app.add_subcommand("mvtest", "Whitened multivariate test");
    add_io(mvtest), add_data(mvtest), add_alpha(mvtest);
    mvtest->add_option("--noise-model", c.noise_model, "Noise model")->transform(CLI::CheckedTransformer(noise_map))->option_text("{far1,iid}");
    mvtest->callback([&] { c.command = Command::mvtest; });

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo rejection rates over a parameter grid");
    add_io(simulate), add_model(simulate), add_alpha(simulate), add_dgp(simulate);
    simulate->add_option("--reps", c.replications, "Replications per cell");
    simulate->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
    simulate->callback([&] { c.command = Command::simulate; });

    auto* generate = app.add_subcommand("generate", "Write one simulated series as coefficient CSV");
    generate->add_option("--output", c.output, "Output file (default: stdout)");
    add_dgp(generate);
    generate->callback([&] { c.command = Command::generate; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kDataError;
    }
    return dispatch(c);
}

} // namespace fpt::cli
