#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>

#include "errors.hpp"
#include "grid.hpp"
#include "mc.hpp"
#include "model.hpp"
#include "solver.hpp"
#include "utility.hpp"

namespace indiff {

/// Everything a run needs. Defaults reproduce the reference configuration
/// (K = 50, theta = 0.01, sigma = 0.3, r = 0.05, mu = 0.1, gamma = 0.1,
/// 6 x 6 x 100 grid over [0.2, 0.6] x [-100, 100] x [0, 100], N = 10,
/// lambda_B = lambda_C = 10, T = 1, exponential utility, call, delta = -1).
struct RunConfig {
    ModelParams model;
    GridSpec grid;
    SolverParams solver;
    UtilityFamily utility = UtilityFamily::Exponential;
    double gamma = 0.1; // exponential risk aversion
    double a = 0.5;     // power exponent
    double b = 1.0;     // logarithmic slope
    std::int64_t mc_paths = 0; // 0 disables the Monte Carlo bound
    std::uint64_t mc_seed = 1;

    UtilityFunction make_utility() const {
        switch (utility) {
        case UtilityFamily::Linear: return UtilityFunction::linear();
        case UtilityFamily::Exponential: return UtilityFunction::exponential(gamma);
        case UtilityFamily::Power: return UtilityFunction::power(a);
        case UtilityFamily::Logarithmic: return UtilityFunction::logarithmic(b);
        }
        throw ConfigError("unknown utility family");
    }

    void validate() const {
        try {
            model.validate();
            grid.validate(model);
            solver.validate();
            (void)make_utility();
        } catch (const ParameterError& e) {
            throw ConfigError(e.what());
        }
        if (mc_paths < 0)
            throw ConfigError("mc_paths must be nonnegative");
        if (mc_paths > 0 && mc_paths < 1000)
            throw ConfigError("mc_paths must be at least 1000 for a reporting run");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& value, int line_no) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(line_no) + ": expected a number, got '" +
                          value + "'");
    }
    if (pos != value.size())
        throw ConfigError("line " + std::to_string(line_no) + ": trailing characters in '" +
                          value + "'");
    return x;
}

inline long parse_integer(const std::string& value, int line_no) {
    const double x = parse_number(value, line_no);
    const long n = static_cast<long>(x);
    if (double(n) != x)
        throw ConfigError("line " + std::to_string(line_no) + ": expected an integer, got '" +
                          value + "'");
    return n;
}

} // namespace detail

/// Parse the line-oriented `key = value` run configuration. Blank lines and
/// lines starting with '#' are ignored. Unknown or duplicate keys are
/// rejected with the offending line number; omitted keys keep their defaults.
inline RunConfig parse_config(const std::string& text) {
    static const std::set<std::string> known = {
        "strike", "theta", "sigma", "r", "mu", "gamma", "a", "b", "utility", "payoff",
        "delta", "T", "N", "N_alpha", "N_beta", "N_S", "L_alpha_min", "L_alpha_max",
        "L_beta_min", "L_beta_max", "S_max", "s_mesh", "lambda_B", "lambda_C", "tol_max",
        "p_max", "mc_paths", "mc_seed"};

    RunConfig cfg;
    std::unordered_map<std::string, std::pair<std::string, int>> seen;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string raw =
            nl == std::string::npos ? text.substr(pos) : text.substr(pos, nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const std::string line = detail::trim(raw);
        if (line.empty() || line[0] == '#')
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (!known.count(key))
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (seen.count(key))
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key +
                              "' (first set on line " + std::to_string(seen[key].second) + ")");
        seen[key] = {value, line_no};
    }

    for (const auto& [key, entry] : seen) {
        const auto& [value, ln] = entry;
        if (key == "strike") cfg.model.strike = detail::parse_number(value, ln);
        else if (key == "theta") cfg.model.theta = detail::parse_number(value, ln);
        else if (key == "sigma") cfg.model.sigma = detail::parse_number(value, ln);
        else if (key == "r") cfg.model.r = detail::parse_number(value, ln);
        else if (key == "mu") cfg.model.mu = detail::parse_number(value, ln);
        else if (key == "gamma") cfg.gamma = detail::parse_number(value, ln);
        else if (key == "a") cfg.a = detail::parse_number(value, ln);
        else if (key == "b") cfg.b = detail::parse_number(value, ln);
        else if (key == "T") cfg.model.maturity = detail::parse_number(value, ln);
        else if (key == "delta") cfg.model.delta = int(detail::parse_integer(value, ln));
        else if (key == "N") cfg.grid.n_time = int(detail::parse_integer(value, ln));
        else if (key == "N_alpha") cfg.grid.n_alpha = int(detail::parse_integer(value, ln));
        else if (key == "N_beta") cfg.grid.n_beta = int(detail::parse_integer(value, ln));
        else if (key == "N_S") cfg.grid.n_s = int(detail::parse_integer(value, ln));
        else if (key == "L_alpha_min") cfg.grid.alpha_min = detail::parse_number(value, ln);
        else if (key == "L_alpha_max") cfg.grid.alpha_max = detail::parse_number(value, ln);
        else if (key == "L_beta_min") cfg.grid.beta_min = detail::parse_number(value, ln);
        else if (key == "L_beta_max") cfg.grid.beta_max = detail::parse_number(value, ln);
        else if (key == "S_max") cfg.grid.s_max = detail::parse_number(value, ln);
        else if (key == "lambda_B") cfg.solver.lambda_b = detail::parse_number(value, ln);
        else if (key == "lambda_C") cfg.solver.lambda_c = detail::parse_number(value, ln);
        else if (key == "tol_max") cfg.solver.tol_max = detail::parse_number(value, ln);
        else if (key == "p_max") cfg.solver.p_max = int(detail::parse_integer(value, ln));
        else if (key == "mc_paths") cfg.mc_paths = detail::parse_integer(value, ln);
        else if (key == "mc_seed")
            cfg.mc_seed = std::uint64_t(detail::parse_integer(value, ln));
        else if (key == "utility") {
            if (value == "linear") cfg.utility = UtilityFamily::Linear;
            else if (value == "exponential") cfg.utility = UtilityFamily::Exponential;
            else if (value == "power") cfg.utility = UtilityFamily::Power;
            else if (value == "logarithmic") cfg.utility = UtilityFamily::Logarithmic;
            else
                throw ConfigError("line " + std::to_string(ln) + ": unknown utility '" + value +
                                  "' (linear|exponential|power|logarithmic)");
        } else if (key == "payoff") {
            if (value == "call") cfg.model.payoff_kind = PayoffKind::Call;
            else if (value == "put") cfg.model.payoff_kind = PayoffKind::Put;
            else
                throw ConfigError("line " + std::to_string(ln) + ": unknown payoff '" + value +
                                  "' (call|put)");
        } else if (key == "s_mesh") {
            if (value == "uniform") cfg.grid.s_mesh = SMeshKind::Uniform;
            else if (value == "loguniform") cfg.grid.s_mesh = SMeshKind::LogUniform;
            else
                throw ConfigError("line " + std::to_string(ln) + ": unknown s_mesh '" + value +
                                  "' (uniform|loguniform)");
        }
    }

    cfg.validate();
    return cfg;
}

} // namespace indiff
