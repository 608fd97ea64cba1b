// Command-line front end: reproduces the singular-value tables, runs the
// verification suites, and emits the asymptotic-law sweep with optional SVG
// plots. Configuration precedence: flags > config file > defaults.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bergman/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "Singular values of Cauchy-transform compositions with the Bergman "
        "projection on weighted Bergman spaces of the unit disc"};
    app.fallthrough();

    bergman::RunConfig cfg;
    app.set_config("--config", "", "key=value configuration file (flags take precedence)");
    app.add_option("--alpha", cfg.alpha, "boundary weight exponent, alpha > -1");
    app.add_option("--beta", cfg.beta,
                   "origin weight exponent, -1/2 <= beta <= 0 unless exploratory");
    app.add_option("--operator", cfg.op, "T | R | both")->capture_default_str();
    app.add_option("--n-min", cfg.n_min, "first singular-value index");
    app.add_option("--n-max", cfg.n_max, "last singular-value index");
    app.add_option("--methods", cfg.methods,
                   "comma-separated subset of quadrature,hypergeometric,asymptotic")
        ->delimiter(',');
    app.add_option("--rel-tol", cfg.rel_tol, "relative tolerance, in (1e-14, 1e-2)");
    app.add_option("--format", cfg.format, "csv | json")->capture_default_str();
    app.add_option("--plot", cfg.plot_path, "write an SVG log-log plot to this path");
    app.add_flag("--allow-exploratory", cfg.allow_exploratory,
                 "evaluate formulas for -1 < beta <= 0 without the compactness gate");

    auto* table = app.add_subcommand("table", "emit one record per (operator, n, method)");
    auto* verify = app.add_subcommand("verify", "run every verification suite for (alpha, beta)");
    auto* asymptotics =
        app.add_subcommand("asymptotics", "n^{alpha+1} s_n sweep over a geometric grid");
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*table) return bergman::cmd_table(cfg, std::cout);
        if (*verify) return bergman::cmd_verify(cfg, std::cout);
        if (*asymptotics) return bergman::cmd_asymptotics(cfg, std::cout);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
