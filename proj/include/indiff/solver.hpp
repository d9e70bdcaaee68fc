#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "discretization.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "tridiagonal.hpp"
#include "utility.hpp"

namespace indiff {

/// Penalty strengths and policy-iteration controls. Tolerances are relative:
/// a step at level n stops once max|V^{n,p+1} - V^{n,p}| drops below
/// tol_max * max(1, ||V^{n+1}||_inf); it is flagged when it exhausts p_max
/// with a difference still above tol_warn * the same scale.
struct SolverParams {
    double lambda_b = 10.0;
    double lambda_c = 10.0;
    double tol_max = 1e-8;
    int p_max = 50;
    double tol_warn = 1e-4;

    void validate() const {
        if (lambda_b < 0.0 || lambda_c < 0.0)
            throw ConfigError("penalty parameters must be nonnegative");
        if (!(tol_max > 0.0))
            throw ConfigError("tol_max must be positive");
        if (p_max < 1)
            throw ConfigError("p_max must be at least 1");
    }
};

struct StepReport {
    int time_index = 0;
    int iterations = 0;
    double tol_final = 0.0;
    bool flagged = false;
};

struct SolveReport {
    std::vector<StepReport> steps;
    bool converged = true;
    double wall_seconds = 0.0;
    long total_policy_iterations = 0;
};

/// Sup norm over the nodes the scheme actually uses. Insolvent placeholders
/// can be astronomically large for the exponential utility and must not set
/// tolerance scales.
inline double solvent_inf_norm(const ValueField& f, const Mesh3D& mesh) {
    double m = 0.0;
    for (std::size_t c = 0; c < f.values.size(); ++c)
        if (mesh.kind(c) != NodeKind::Insolvent)
            m = std::max(m, std::abs(f.values[c]));
    return m;
}

namespace detail {

inline ValueField dirichlet_field(const Mesh3D& mesh, const ModelParams& params,
                                  const UtilityFunction& u, int delta, int time_index) {
    const GridSpec& g = mesh.spec();
    ValueField f;
    f.time_index = time_index;
    f.values.assign(mesh.node_count(), 0.0);
    for (int i = 0; i <= g.n_alpha; ++i)
        for (int j = 0; j <= g.n_beta; ++j)
            for (int k = 0; k <= g.n_s; ++k) {
                const std::size_t c = mesh.stack_index(i, j, k);
                const double xi = mesh.node_wealth(i, j, k) + delta * payoff(mesh.price(k), params);
                if (mesh.kind(c) == NodeKind::Insolvent) {
                    // never referenced by interior stencils; keep a finite placeholder
                    f.values[c] = u.in_domain(xi) ? u.value(xi) : 0.0;
                    continue;
                }
                if (!u.in_domain(xi))
                    throw UtilityDomainError(
                        "utility argument " + std::to_string(xi) + " out of domain at node (" +
                        std::to_string(i) + ", " + std::to_string(j) + ", " + std::to_string(k) +
                        "), alpha=" + std::to_string(mesh.alpha(i)) + " beta=" +
                        std::to_string(mesh.beta(j)) + " S=" + std::to_string(mesh.price(k)));
                f.values[c] = u.value(xi);
            }
    return f;
}

} // namespace detail

/// V^N_{ijk} = U(w_{ijk} + delta C_T(S_k)) over the box. Throws
/// UtilityDomainError naming the first solvent node whose argument leaves the
/// utility domain.
inline ValueField terminal_condition(const Mesh3D& mesh, const ModelParams& params,
                                     const UtilityFunction& u, int delta) {
    return detail::dirichlet_field(mesh, params, u, delta, mesh.spec().n_time);
}

/// Dirichlet data for boundary (and insolvent-adjacent) nodes. The formula is
/// the terminal one and carries no time dependence, so it is computed once
/// and reused for every level.
inline ValueField boundary_condition(const Mesh3D& mesh, const ModelParams& params,
                                     const UtilityFunction& u, int delta, int time_index) {
    return detail::dirichlet_field(mesh, params, u, delta, time_index);
}

/// One backward time step with inner policy iteration, reusing buffers across
/// steps. The iterate V^{n,0} starts at V^{n+1}; each pass recomputes the
/// penalty coefficients from the discrete operators at V^{n,p}, solves every
/// (i,j) block with the Thomas algorithm, and stops on the tolerance or at
/// p_max.
class BackwardStepper {
public:
    BackwardStepper(const Mesh3D& mesh, const ModelParams& params, const SolverParams& numerics)
        : mesh_(mesh), params_(params), numerics_(numerics),
          dt_(params.maturity / mesh.spec().n_time) {
        policy_.lambda_b = numerics.lambda_b;
        policy_.lambda_c = numerics.lambda_c;
        const GridSpec& g = mesh.spec();
        for (int i = 1; i < g.n_alpha; ++i)
            for (int j = 1; j < g.n_beta; ++j)
                for (int k = 1; k < g.n_s; ++k)
                    if (mesh.interior(i, j, k)) {
                        blocks_.push_back({i, j});
                        break;
                    }
    }

    double dt() const { return dt_; }
    const std::vector<std::pair<int, int>>& blocks() const { return blocks_; }

    std::pair<ValueField, StepReport> step(const ValueField& v_next) {
        StepReport report;
        report.time_index = v_next.time_index - 1;

        const double scale = std::max(1.0, solvent_inf_norm(v_next, mesh_));
        const double tol_stop = numerics_.tol_max * scale;
        const double tol_warn = numerics_.tol_warn * scale;

        ValueField cur = v_next; // V^{n,0}
        cur.time_index = report.time_index;
        ValueField nxt = cur;

        double tol = std::numeric_limits<double>::infinity();
        int p = 0;
        while (p < numerics_.p_max) {
            update_penalty_policy(policy_, cur, mesh_, params_);
            tol = 0.0;
            for (const auto& [i, j] : blocks_) {
                TridiagonalSystem sys = assemble_block(i, j, mesh_, params_, dt_, policy_, cur,
                                                       v_next, /*implicit_penalty_diagonal=*/true);
                thomas_solve(sys, x_, scratch_);
                const std::size_t base = mesh_.stack_index(i, j, 0);
                for (int k = 0; k <= mesh_.spec().n_s; ++k) {
                    tol = std::max(tol, std::abs(x_[std::size_t(k)] - cur[base + k]));
                    nxt[base + k] = x_[std::size_t(k)];
                }
            }
            std::swap(cur.values, nxt.values); // cur is now V^{n,p+1}
            ++p;
            if (tol < tol_stop)
                break;
        }

        report.iterations = p;
        report.tol_final = tol;
        report.flagged = (p == numerics_.p_max && tol > tol_warn);
        return {std::move(cur), report};
    }

private:
    const Mesh3D& mesh_;
    ModelParams params_;
    SolverParams numerics_;
    double dt_;
    PenaltyPolicy policy_;
    std::vector<std::pair<int, int>> blocks_;
    std::vector<double> x_, scratch_;
};

/// Single backward step from the converged level n+1 field.
inline std::pair<ValueField, StepReport> step_backward(const ValueField& v_next, const Mesh3D& mesh,
                                                       const ModelParams& params,
                                                       const SolverParams& numerics) {
    BackwardStepper stepper(mesh, params, numerics);
    return stepper.step(v_next);
}

/// Full backward sweep n = N-1, ..., 0; returns the t = 0 field.
inline std::pair<ValueField, SolveReport> solve(const Mesh3D& mesh, const ModelParams& params,
                                                const SolverParams& numerics,
                                                const UtilityFunction& u, int delta) {
    numerics.validate();
    const auto t_start = std::chrono::steady_clock::now();

    SolveReport report;
    ValueField v = terminal_condition(mesh, params, u, delta);
    BackwardStepper stepper(mesh, params, numerics);
    for (int n = mesh.spec().n_time - 1; n >= 0; --n) {
        auto [stepped, step_rep] = stepper.step(v);
        v = std::move(stepped);
        report.total_policy_iterations += step_rep.iterations;
        if (step_rep.flagged)
            report.converged = false;
        report.steps.push_back(step_rep);
    }

    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(v), std::move(report)};
}

/// Post-hoc feasibility of the complementarity conditions at one time level:
/// counts interior nodes where L_B V or L_C V falls below
/// -max(1, ||V||_inf) / lambda, and records the worst constraint violations.
struct ComplementarityReport {
    double worst_b = 0.0; // max(0, -min L_B V)
    double worst_c = 0.0;
    std::size_t violations_b = 0;
    std::size_t violations_c = 0;
    std::size_t n_interior = 0;
    double threshold_b = 0.0;
    double threshold_c = 0.0;
};

inline ComplementarityReport check_complementarity(const ValueField& v, const Mesh3D& mesh,
                                                   const ModelParams& params, double lambda_b,
                                                   double lambda_c) {
    ComplementarityReport rep;
    const double c = std::max(1.0, solvent_inf_norm(v, mesh));
    rep.threshold_b = lambda_b > 0.0 ? c / lambda_b : std::numeric_limits<double>::infinity();
    rep.threshold_c = lambda_c > 0.0 ? c / lambda_c : std::numeric_limits<double>::infinity();
    const GridSpec& g = mesh.spec();
    for (int i = 1; i < g.n_alpha; ++i)
        for (int j = 1; j < g.n_beta; ++j)
            for (int k = 1; k < g.n_s; ++k) {
                if (!mesh.interior(i, j, k))
                    continue;
                ++rep.n_interior;
                const double lb = apply_lb(v, mesh, params, i, j, k);
                const double lc = apply_lc(v, mesh, params, i, j, k);
                rep.worst_b = std::max(rep.worst_b, -lb);
                rep.worst_c = std::max(rep.worst_c, -lc);
                if (lb < -rep.threshold_b) ++rep.violations_b;
                if (lc < -rep.threshold_c) ++rep.violations_c;
            }
    return rep;
}

} // namespace indiff
