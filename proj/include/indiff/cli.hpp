#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "runner.hpp"

namespace indiff {

/// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
/// 4 utility-domain violation. `check` additionally returns 1 when a
/// property check fails.
enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_config = 2, exit_numerical = 3, exit_domain = 4 };

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + path.string() + "'");
    out << content;
}

inline std::pair<double, double> parse_slice(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw ConfigError("--slice expects 'alpha,beta', got '" + text + "'");
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ConfigError("--slice expects 'alpha,beta', got '" + text + "'");
    }
}

inline std::vector<std::string> split_csv_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        if (comma == std::string::npos) {
            out.push_back(text.substr(pos));
            break;
        }
        out.push_back(text.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return out;
}

/// Hard property gates for the check subcommand: complementarity feasibility
/// of both solved fields and the Monte Carlo lower bound when enabled. The
/// closed-form comparisons are reported for inspection; on a truncated box
/// they carry boundary layers whose assessment belongs to the run report.
inline bool checks_pass(const RunArtifacts& art) {
    bool ok = true;
    ok = ok && art.comp0.violations_b == 0 && art.comp0.violations_c == 0;
    ok = ok && art.compd.violations_b == 0 && art.compd.violations_c == 0;
    if (art.mc)
        ok = ok && art.mc->holds;
    return ok;
}

} // namespace detail

inline int cli_main(int argc, const char* const* argv) {
    CLI::App app{"utility-indifference option pricing under proportional transaction costs"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", slice_text = "0.467,33.3";
    std::string scale_dims = "S,alpha,beta";
    int repeats = 3;

    CLI::App* price = app.add_subcommand("price", "solve both value functions, write price_curve.csv and report.txt");
    price->add_option("--config", config_path, "run configuration file")->required();
    price->add_option("--slice", slice_text, "alpha,beta of the price-curve slice (snapped to the nearest node)");
    price->add_option("--out", out_dir, "output directory");

    CLI::App* bench = app.add_subcommand("bench", "scaling benchmark, writes bench.csv");
    bench->add_option("--config", config_path, "run configuration file")->required();
    bench->add_option("--scale-dims", scale_dims, "comma list of dimensions to double (S,alpha,beta)");
    bench->add_option("--out", out_dir, "output directory");
    bench->add_option("--repeats", repeats, "timed repetitions per size (median is reported)");

    CLI::App* check = app.add_subcommand("check", "run the property suite only");
    check->add_option("--config", config_path, "run configuration file")->required();
    check->add_option("--slice", slice_text, "alpha,beta of the probe slice");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        const RunConfig cfg = parse_config(detail::read_file(config_path));
        const auto [slice_alpha, slice_beta] = detail::parse_slice(slice_text);

        if (price->parsed()) {
            const RunArtifacts art = run_price(cfg, slice_alpha, slice_beta);
            const std::filesystem::path dir(out_dir);
            std::filesystem::create_directories(dir);
            detail::write_file(dir / "price_curve.csv", price_curve_csv(art, cfg.model));
            detail::write_file(dir / "report.txt", run_report(art, cfg));
            std::cout << "wrote " << (dir / "price_curve.csv").string() << " and "
                      << (dir / "report.txt").string() << "\n";
            if (!art.report0.converged || !art.reportd.converged)
                std::cout << "warning: policy iteration hit p_max on some steps (see report)\n";
            return exit_ok;
        }
        if (check->parsed()) {
            const RunArtifacts art = run_price(cfg, slice_alpha, slice_beta);
            std::cout << run_report(art, cfg);
            return detail::checks_pass(art) ? exit_ok : exit_check_failed;
        }
        if (bench->parsed()) {
            const auto rows = run_bench(cfg, detail::split_csv_list(scale_dims), repeats);
            const std::filesystem::path dir(out_dir);
            std::filesystem::create_directories(dir);
            detail::write_file(dir / "bench.csv", bench_csv(rows));
            for (const auto& row : rows)
                std::cout << row.label << ": cells=" << row.cells << " seconds=" << row.seconds
                          << "\n";
            std::cout << "wrote " << (dir / "bench.csv").string() << "\n";
            return exit_ok;
        }
        return exit_config;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const UtilityDomainError& e) {
        std::cerr << "utility domain error: " << e.what() << "\n";
        return exit_domain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
}

} // namespace indiff
