#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "field.hpp"
#include "grid.hpp"
#include "model.hpp"
#include "solver.hpp"
#include "utility.hpp"

namespace indiff {

/// Certainty equivalent z of a value v at wealth w: U(w - z) = v, so
/// z = w - U^-1(v). Throws UtilityDomainError when v is outside the range of U.
inline double certainty_equivalent(double v_value, double w, const UtilityFunction& u) {
    return w - u.inverse(v_value);
}

/// Transformed field recovered from a value field by inverting
/// v = U(e^{mu (T-t)} (w + A + V)):  V = e^{-mu (T-t)} U^-1(v) - w - A(beta, t).
/// Applied at the terminal level it reproduces delta * C_T(S) exactly.
/// Entries at insolvent nodes are 0.
inline std::vector<double> recover_script_v(const ValueField& v, const Mesh3D& mesh,
                                            const ModelParams& params, const UtilityFunction& u,
                                            double t) {
    const GridSpec& g = mesh.spec();
    const double growth = std::exp(-params.mu * (params.maturity - t));
    std::vector<double> out(mesh.node_count(), 0.0);
    for (int i = 0; i <= g.n_alpha; ++i)
        for (int j = 0; j <= g.n_beta; ++j)
            for (int k = 0; k <= g.n_s; ++k) {
                const std::size_t c = mesh.stack_index(i, j, k);
                if (mesh.kind(c) == NodeKind::Insolvent)
                    continue;
                out[c] = growth * u.inverse(v[c]) - mesh.node_wealth(i, j, k) -
                         shift_a(mesh.beta(j), t, params);
            }
    return out;
}

/// Indifference price and the recovered transformed fields at one time level.
///
/// price is the discounted difference of certainty equivalents,
/// e^{-r (T-t)} (U^-1(v0) - U^-1(vdelta)) nodewise (0 at insolvent nodes).
/// bs_bound holds the closed-form comparator V_BS(S_k, t) per price node,
/// signed with the run's position flag delta.
struct PriceSurface {
    std::vector<double> price;
    ValueField v0;
    ValueField vdelta;
    std::vector<double> script_v0;
    std::vector<double> script_vdelta;
    std::vector<double> bs_bound;
    double t = 0.0;
};

inline PriceSurface indifference_price(const ValueField& v0, const ValueField& vdelta,
                                       const UtilityFunction& u, const ModelParams& params,
                                       const Mesh3D& mesh) {
    if (v0.time_index != vdelta.time_index)
        throw ContractViolation("value fields are at different time levels: " +
                                std::to_string(v0.time_index) + " vs " +
                                std::to_string(vdelta.time_index));
    if (v0.values.size() != mesh.node_count() || vdelta.values.size() != mesh.node_count())
        throw ContractViolation("value fields do not match the mesh");

    PriceSurface surf;
    surf.t = v0.time_index * params.maturity / mesh.spec().n_time;
    surf.v0 = v0;
    surf.vdelta = vdelta;
    const double disc = std::exp(-params.r * (params.maturity - surf.t));

    surf.price.assign(mesh.node_count(), 0.0);
    const GridSpec& g = mesh.spec();
    for (int i = 0; i <= g.n_alpha; ++i)
        for (int j = 0; j <= g.n_beta; ++j)
            for (int k = 0; k <= g.n_s; ++k) {
                const std::size_t c = mesh.stack_index(i, j, k);
                if (mesh.kind(c) == NodeKind::Insolvent)
                    continue;
                surf.price[c] = disc * (u.inverse(v0[c]) - u.inverse(vdelta[c]));
            }

    surf.script_v0 = recover_script_v(v0, mesh, params, u, surf.t);
    surf.script_vdelta = recover_script_v(vdelta, mesh, params, u, surf.t);

    surf.bs_bound.resize(g.n_s + 1);
    for (int k = 0; k <= g.n_s; ++k)
        surf.bs_bound[k] = bs_closed_form(mesh.price(k), surf.t, params);
    return surf;
}

namespace detail {

/// Nodes at least two layers from any boundary: interior with all six face
/// neighbors interior. Dirichlet data pollutes a layer next to the boundary
/// that the comparison-principle bounds do not cover.
inline bool two_layers_interior(const Mesh3D& mesh, int i, int j, int k) {
    return mesh.interior(i, j, k) && mesh.interior(i - 1, j, k) && mesh.interior(i + 1, j, k) &&
           mesh.interior(i, j - 1, k) && mesh.interior(i, j + 1, k) &&
           mesh.interior(i, j, k - 1) && mesh.interior(i, j, k + 1);
}

} // namespace detail

/// Upper-bound and beta-independence checks of the recovered transformed
/// fields against the closed form, evaluated away from the boundary layer.
struct Prop1Report {
    bool applicable = false;     // constant risk aversion (linear / exponential) only
    double max_excess = 0.0;     // max of script_vdelta - bs_bound over checked nodes
    std::size_t violations = 0;  // nodes with excess > eps_bound
    double max_excess_v0 = 0.0;  // max of script_v0 - 0
    double max_beta_variation_vdelta = 0.0;
    double max_beta_variation_v0 = 0.0;
    std::size_t nodes_checked = 0;
    double eps_bound = 0.0;
    double eps_beta = 0.0;
};

inline Prop1Report check_prop1(const PriceSurface& surf, const Mesh3D& mesh,
                               const ModelParams& params, const UtilityFunction& u,
                               double eps_bound_factor = 0.005, double eps_beta_factor = 0.01) {
    Prop1Report rep;
    rep.applicable = u.family() == UtilityFamily::Linear || u.family() == UtilityFamily::Exponential;
    rep.eps_bound = eps_bound_factor * params.strike;
    rep.eps_beta = eps_beta_factor * params.strike;

    const GridSpec& g = mesh.spec();
    rep.max_excess = -std::numeric_limits<double>::infinity();
    rep.max_excess_v0 = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < g.n_alpha; ++i)
        for (int k = 1; k < g.n_s; ++k) {
            // bound check per node, beta variation across the eligible j's of
            // each (i,k) line
            double sum_vd = 0.0, sum_v0 = 0.0;
            std::vector<double> vds, v0s;
            for (int j = 1; j < g.n_beta; ++j) {
                if (!detail::two_layers_interior(mesh, i, j, k))
                    continue;
                const std::size_t c = mesh.stack_index(i, j, k);
                ++rep.nodes_checked;
                const double excess = surf.script_vdelta[c] - surf.bs_bound[k];
                rep.max_excess = std::max(rep.max_excess, excess);
                if (excess > rep.eps_bound)
                    ++rep.violations;
                rep.max_excess_v0 = std::max(rep.max_excess_v0, surf.script_v0[c]);
                vds.push_back(surf.script_vdelta[c]);
                v0s.push_back(surf.script_v0[c]);
                sum_vd += surf.script_vdelta[c];
                sum_v0 += surf.script_v0[c];
            }
            if (vds.size() < 2)
                continue;
            const double mean_vd = sum_vd / vds.size();
            const double mean_v0 = sum_v0 / v0s.size();
            for (double x : vds)
                rep.max_beta_variation_vdelta =
                    std::max(rep.max_beta_variation_vdelta, std::abs(x - mean_vd));
            for (double x : v0s)
                rep.max_beta_variation_v0 =
                    std::max(rep.max_beta_variation_v0, std::abs(x - mean_v0));
        }
    if (rep.nodes_checked == 0) {
        rep.max_excess = 0.0;
        rep.max_excess_v0 = 0.0;
    }
    return rep;
}

/// Quantitative degeneration check: with the linear utility and theta = 0 the
/// price must reproduce e^{(mu - r)(T-t)} V_BS. Evaluated over nodes two
/// layers from the boundary with S in [s_lo, s_hi].
struct Prop2Report {
    bool applicable = false; // linear utility and theta == 0
    double max_rel_error = 0.0;
    std::size_t nodes_checked = 0;
};

inline Prop2Report check_prop2(const PriceSurface& surf, const Mesh3D& mesh,
                               const ModelParams& params, const UtilityFunction& u, double s_lo,
                               double s_hi) {
    Prop2Report rep;
    rep.applicable = u.family() == UtilityFamily::Linear && params.theta == 0.0;
    const GridSpec& g = mesh.spec();
    const double growth = std::exp((params.mu - params.r) * (params.maturity - surf.t));
    for (int k = 1; k < g.n_s; ++k) {
        const double s = mesh.price(k);
        if (s < s_lo || s > s_hi)
            continue;
        // price = e^{(mu-r)(T-t)} (script_v0 - script_vdelta) targets the
        // negated delta-signed closed form
        const double target = -growth * surf.bs_bound[k];
        for (int i = 1; i < g.n_alpha; ++i)
            for (int j = 1; j < g.n_beta; ++j) {
                if (!detail::two_layers_interior(mesh, i, j, k))
                    continue;
                const std::size_t c = mesh.stack_index(i, j, k);
                ++rep.nodes_checked;
                rep.max_rel_error = std::max(
                    rep.max_rel_error, std::abs(surf.price[c] - target) / params.strike);
            }
    }
    return rep;
}

} // namespace indiff
