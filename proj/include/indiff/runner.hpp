#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "grid.hpp"
#include "mc.hpp"
#include "pricing.hpp"
#include "solver.hpp"

namespace indiff {

/// 17-significant-digit decimal rendering, enough to round-trip a double.
inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct SliceIndex {
    int i = 0;
    int j = 0;
};

/// Grid node nearest to the requested (alpha, beta) slice.
inline SliceIndex nearest_slice(const Mesh3D& mesh, double alpha, double beta) {
    SliceIndex s;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < int(mesh.alphas().size()); ++i) {
        const double d = std::abs(mesh.alpha(i) - alpha);
        if (d < best) {
            best = d;
            s.i = i;
        }
    }
    best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < int(mesh.betas().size()); ++j) {
        const double d = std::abs(mesh.beta(j) - beta);
        if (d < best) {
            best = d;
            s.j = j;
        }
    }
    return s;
}

struct McBound {
    McResult mc;
    double v0_at_node = 0.0;
    double margin = 0.0; // v0 - (mean - 3 SE - 0.01 max(1, |v0|)); nonnegative when the bound holds
    bool holds = false;
    int i = 0, j = 0, k = 0;
};

struct RunArtifacts {
    Mesh3D mesh;
    PriceSurface surface;
    SolveReport report0;
    SolveReport reportd;
    ComplementarityReport comp0;
    ComplementarityReport compd;
    Prop1Report prop1;
    Prop2Report prop2;
    std::optional<McBound> mc;
    SliceIndex slice;
};

/// Solve both value functions, extract the price surface and run every
/// checker. slice_alpha/slice_beta select the price-curve slice (snapped to
/// the nearest grid node).
inline RunArtifacts run_price(const RunConfig& cfg, double slice_alpha = 0.467,
                              double slice_beta = 33.3) {
    cfg.validate();
    RunArtifacts art;
    art.mesh = Mesh3D::build(cfg.grid, cfg.model);
    const UtilityFunction u = cfg.make_utility();

    auto [v0, rep0] = solve(art.mesh, cfg.model, cfg.solver, u, 0);
    auto [vd, repd] = solve(art.mesh, cfg.model, cfg.solver, u, cfg.model.delta);
    art.report0 = std::move(rep0);
    art.reportd = std::move(repd);

    art.comp0 = check_complementarity(v0, art.mesh, cfg.model, cfg.solver.lambda_b,
                                      cfg.solver.lambda_c);
    art.compd = check_complementarity(vd, art.mesh, cfg.model, cfg.solver.lambda_b,
                                      cfg.solver.lambda_c);

    art.surface = indifference_price(v0, vd, u, cfg.model, art.mesh);
    art.prop1 = check_prop1(art.surface, art.mesh, cfg.model, u);
    art.prop2 = check_prop2(art.surface, art.mesh, cfg.model, u, 0.8 * cfg.model.strike,
                            1.2 * cfg.model.strike);

    art.slice = nearest_slice(art.mesh, slice_alpha, slice_beta);

    if (cfg.mc_paths > 0) {
        McBound bound;
        bound.i = art.slice.i;
        bound.j = art.slice.j;
        int best_k = 0;
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < int(art.mesh.prices().size()); ++k) {
            const double d = std::abs(art.mesh.price(k) - cfg.model.strike);
            if (d < best) {
                best = d;
                best_k = k;
            }
        }
        bound.k = best_k;
        McConfig mc{cfg.mc_paths, cfg.mc_seed, true};
        bound.mc = buy_and_hold_utility(art.mesh.alpha(bound.i), art.mesh.beta(bound.j),
                                        art.mesh.price(bound.k), cfg.model, u, mc);
        bound.v0_at_node = art.surface.v0[art.mesh.stack_index(bound.i, bound.j, bound.k)];
        const double slack = 3.0 * bound.mc.std_error + 0.01 * std::max(1.0, std::abs(bound.v0_at_node));
        bound.margin = bound.v0_at_node - (bound.mc.mean - slack);
        bound.holds = bound.margin >= 0.0;
        art.mc = bound;
    }
    return art;
}

/// Price curve along the (alpha, beta) slice. The bs_bound column is the
/// forward-discounted closed-form reference e^{(mu-r)(T-t)} V_BS with the
/// buyer/seller sign folded in, i.e. the value the price degenerates to for
/// the linear utility without transaction costs.
inline std::string price_curve_csv(const RunArtifacts& art, const ModelParams& params) {
    const Mesh3D& mesh = art.mesh;
    const double growth = std::exp((params.mu - params.r) * (params.maturity - art.surface.t));
    std::string out = "S,price,bs_bound,script_v0,script_vdelta\n";
    for (int k = 0; k < int(mesh.prices().size()); ++k) {
        const std::size_t c = mesh.stack_index(art.slice.i, art.slice.j, k);
        out += format_g17(mesh.price(k));
        out += ',';
        out += format_g17(art.surface.price[c]);
        out += ',';
        out += format_g17(-growth * art.surface.bs_bound[k]);
        out += ',';
        out += format_g17(art.surface.script_v0[c]);
        out += ',';
        out += format_g17(art.surface.script_vdelta[c]);
        out += '\n';
    }
    return out;
}

inline std::string describe_solve(const char* label, const SolveReport& rep) {
    std::string s(label);
    s += ": steps=" + std::to_string(rep.steps.size());
    s += " policy_iterations=" + std::to_string(rep.total_policy_iterations);
    s += std::string(" converged=") + (rep.converged ? "yes" : "no");
    double worst_tol = 0.0;
    for (const auto& st : rep.steps)
        worst_tol = std::max(worst_tol, st.tol_final);
    s += " worst_step_tol=" + format_g17(worst_tol);
    s += " wall_s=" + format_g17(rep.wall_seconds);
    s += '\n';
    for (const auto& st : rep.steps)
        if (st.flagged)
            s += "  warning: level " + std::to_string(st.time_index) + " stopped at p_max with tol " +
                 format_g17(st.tol_final) + "\n";
    return s;
}

inline std::string describe_complementarity(const char* label, const ComplementarityReport& rep) {
    std::string s(label);
    s += ": interior=" + std::to_string(rep.n_interior);
    s += " violations_B=" + std::to_string(rep.violations_b) + "/" + std::to_string(rep.n_interior);
    s += " violations_C=" + std::to_string(rep.violations_c) + "/" + std::to_string(rep.n_interior);
    s += " worst_B=" + format_g17(rep.worst_b);
    s += " worst_C=" + format_g17(rep.worst_c);
    s += " threshold_B=" + format_g17(rep.threshold_b);
    s += " threshold_C=" + format_g17(rep.threshold_c);
    s += '\n';
    return s;
}

/// Human-readable run report with the solver diagnostics and every checker
/// result.
inline std::string run_report(const RunArtifacts& art, const RunConfig& cfg) {
    std::string s;
    s += "utility=" + std::string(to_string(cfg.utility));
    s += " payoff=" + std::string(to_string(cfg.model.payoff_kind));
    s += " delta=" + std::to_string(cfg.model.delta);
    s += " K=" + format_g17(cfg.model.strike);
    s += " theta=" + format_g17(cfg.model.theta);
    s += " sigma=" + format_g17(cfg.model.sigma);
    s += " r=" + format_g17(cfg.model.r);
    s += " mu=" + format_g17(cfg.model.mu);
    s += " T=" + format_g17(cfg.model.maturity);
    s += "\ngrid: " + std::to_string(cfg.grid.n_alpha) + "x" + std::to_string(cfg.grid.n_beta) +
         "x" + std::to_string(cfg.grid.n_s) + " N=" + std::to_string(cfg.grid.n_time);
    s += " lambda_B=" + format_g17(cfg.solver.lambda_b) +
         " lambda_C=" + format_g17(cfg.solver.lambda_c) + "\n";
    s += "slice: alpha=" + format_g17(art.mesh.alpha(art.slice.i)) +
         " beta=" + format_g17(art.mesh.beta(art.slice.j)) + "\n\n";

    s += describe_solve("solve v0", art.report0);
    s += describe_solve("solve vdelta", art.reportd);
    s += '\n';
    s += describe_complementarity("complementarity v0", art.comp0);
    s += describe_complementarity("complementarity vdelta", art.compd);
    s += '\n';

    s += "upper bound check (recovered field vs closed form): ";
    if (!art.prop1.applicable)
        s += "not applicable to this utility\n";
    else {
        s += "max_excess=" + format_g17(art.prop1.max_excess) +
             " violations=" + std::to_string(art.prop1.violations) + "/" +
             std::to_string(art.prop1.nodes_checked) + " (eps=" + format_g17(art.prop1.eps_bound) +
             ")\n";
        s += "beta independence: max_variation_vdelta=" +
             format_g17(art.prop1.max_beta_variation_vdelta) +
             " max_variation_v0=" + format_g17(art.prop1.max_beta_variation_v0) +
             " (eps=" + format_g17(art.prop1.eps_beta) + ")\n";
    }

    s += "degeneration check (price vs discounted closed form): ";
    if (!art.prop2.applicable)
        s += "not applicable (needs linear utility and theta = 0)\n";
    else
        s += "max_rel_error=" + format_g17(art.prop2.max_rel_error) + " over " +
             std::to_string(art.prop2.nodes_checked) + " nodes\n";

    s += "monte carlo lower bound: ";
    if (!art.mc)
        s += "disabled (mc_paths = 0)\n";
    else {
        s += "mean=" + format_g17(art.mc->mc.mean) + " se=" + format_g17(art.mc->mc.std_error) +
             " v0=" + format_g17(art.mc->v0_at_node) + " margin=" + format_g17(art.mc->margin) +
             (art.mc->holds ? " (holds)\n" : " (VIOLATED)\n");
    }
    return s;
}

struct BenchRow {
    std::string label;
    std::size_t cells = 0;
    double seconds = 0.0;
    double seconds_per_cell_per_iter = 0.0;
};

/// Scaling benchmark: a base run plus one run per requested dimension with
/// that dimension doubled. dims entries are "S", "alpha" or "beta".
///
/// The policy iteration is pinned to a fixed count so wall time tracks the
/// operation count, and the timed sweeps are interleaved across sizes (one
/// warm-up sweep, then `repeats` full sweeps, median per size) so slow clock
/// or load drift cancels out of the ratios.
inline std::vector<BenchRow> run_bench(const RunConfig& cfg, const std::vector<std::string>& dims,
                                       int repeats = 3) {
    std::vector<RunConfig> configs;
    std::vector<std::string> labels;
    configs.push_back(cfg);
    labels.push_back("base");
    for (const std::string& d : dims) {
        RunConfig c = cfg;
        if (d == "S") c.grid.n_s *= 2;
        else if (d == "alpha") c.grid.n_alpha *= 2;
        else if (d == "beta") c.grid.n_beta *= 2;
        else
            throw ConfigError("unknown scale dimension '" + d + "' (S|alpha|beta)");
        configs.push_back(c);
        labels.push_back("2x" + d);
    }

    std::vector<Mesh3D> meshes;
    std::vector<long> iters(configs.size(), 0);
    std::vector<std::vector<double>> times(configs.size());
    for (RunConfig& c : configs) {
        c.solver.tol_max = 1e-300; // never reached: every step runs exactly p_max iterations
        c.solver.p_max = std::min(cfg.solver.p_max, 4);
        c.validate();
        meshes.push_back(Mesh3D::build(c.grid, c.model));
    }

    const UtilityFunction u = cfg.make_utility();
    for (int rep = 0; rep <= std::max(repeats, 1); ++rep) {
        for (std::size_t s = 0; s < configs.size(); ++s) {
            auto [v, report] = solve(meshes[s], configs[s].model, configs[s].solver, u,
                                     configs[s].model.delta);
            (void)v;
            if (rep == 0)
                continue; // warm-up sweep
            times[s].push_back(report.wall_seconds);
            iters[s] = report.total_policy_iterations;
        }
    }

    std::vector<BenchRow> rows;
    for (std::size_t s = 0; s < configs.size(); ++s) {
        std::sort(times[s].begin(), times[s].end());
        BenchRow row;
        row.label = labels[s];
        row.cells = meshes[s].node_count();
        row.seconds = times[s][times[s].size() / 2];
        row.seconds_per_cell_per_iter =
            iters[s] > 0 ? row.seconds / (double(row.cells) * double(iters[s])) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out = "cells,seconds,seconds_per_cell_per_iter\n";
    for (const auto& r : rows) {
        out += std::to_string(r.cells);
        out += ',';
        out += format_g17(r.seconds);
        out += ',';
        out += format_g17(r.seconds_per_cell_per_iter);
        out += '\n';
    }
    return out;
}

} // namespace indiff
