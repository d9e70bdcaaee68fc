#include <doctest.h>

#include <cmath>

#include <indiff/pricing.hpp>
#include <indiff/solver.hpp>

using namespace indiff;

namespace {

ModelParams reference_params() {
    ModelParams p;
    p.strike = 50.0;
    p.theta = 0.01;
    return p;
}

} // namespace

TEST_CASE("certainty equivalent") {
    const auto lin = UtilityFunction::linear();
    CHECK(certainty_equivalent(4.0, 10.0, lin) == doctest::Approx(6.0));
    const auto exp_u = UtilityFunction::exponential(0.1);
    CHECK(certainty_equivalent(exp_u.value(10.0), 10.0, exp_u) == doctest::Approx(0.0));
    CHECK(certainty_equivalent(exp_u.value(4.0), 10.0, exp_u) == doctest::Approx(6.0));
    CHECK_THROWS_AS(certainty_equivalent(1.5, 10.0, exp_u), UtilityDomainError);
}

TEST_CASE("recovering the transformed field inverts the forward transform") {
    const ModelParams p = reference_params();
    const Mesh3D mesh = Mesh3D::build(GridSpec{}, p);
    const auto u = UtilityFunction::exponential(0.1);
    const double t = 0.3;
    const double growth = std::exp(p.mu * (p.maturity - t));

    ValueField v;
    v.time_index = 3;
    v.values.assign(mesh.node_count(), 0.0);
    std::vector<double> script_in(mesh.node_count(), 0.0);
    for (int i = 0; i <= mesh.spec().n_alpha; ++i)
        for (int j = 0; j <= mesh.spec().n_beta; ++j)
            for (int k = 0; k <= mesh.spec().n_s; ++k) {
                const std::size_t c = mesh.stack_index(i, j, k);
                if (mesh.kind(c) == NodeKind::Insolvent)
                    continue;
                script_in[c] = 0.05 * mesh.price(k) + 0.2 * mesh.alpha(i);
                const double z = growth * (mesh.node_wealth(i, j, k) +
                                           shift_a(mesh.beta(j), t, p) + script_in[c]);
                v[c] = u.value(z);
            }

    const auto script_out = recover_script_v(v, mesh, p, u, t);
    for (int i = 0; i <= mesh.spec().n_alpha; ++i)
        for (int j = 0; j <= mesh.spec().n_beta; ++j)
            for (int k = 0; k <= mesh.spec().n_s; ++k) {
                const std::size_t c = mesh.stack_index(i, j, k);
                if (mesh.kind(c) == NodeKind::Insolvent)
                    continue;
                // the round trip is conditioned on the size of the transform
                // argument, not of the transformed field itself
                const double scale =
                    1.0 + std::abs(mesh.node_wealth(i, j, k)) + std::abs(script_in[c]);
                CHECK(std::abs(script_out[c] - script_in[c]) <= 1e-10 * scale);
            }
}

TEST_CASE("recovered terminal field equals the signed payoff") {
    // moderate wealth box: the exponential inverse loses digits like e^{gamma z}
    ModelParams p = reference_params();
    p.strike = 30.0;
    GridSpec spec;
    spec.beta_min = -20.0;
    spec.beta_max = 40.0;
    spec.s_max = 60.0;
    const Mesh3D mesh = Mesh3D::build(spec, p);
    const auto u = UtilityFunction::exponential(0.1);

    SUBCASE("no position") {
        const ValueField v = terminal_condition(mesh, p, u, 0);
        const auto script = recover_script_v(v, mesh, p, u, p.maturity);
        for (int i = 0; i <= mesh.spec().n_alpha; ++i)
            for (int j = 0; j <= mesh.spec().n_beta; ++j)
                for (int k = 0; k <= mesh.spec().n_s; ++k)
                    if (mesh.solvent(i, j, k))
                        CHECK(std::abs(script[mesh.stack_index(i, j, k)]) <=
                              1e-10 * (1.0 + std::abs(mesh.node_wealth(i, j, k))));
    }
    SUBCASE("long seller") {
        const ValueField v = terminal_condition(mesh, p, u, 1);
        const auto script = recover_script_v(v, mesh, p, u, p.maturity);
        for (int i = 0; i <= mesh.spec().n_alpha; ++i)
            for (int j = 0; j <= mesh.spec().n_beta; ++j)
                for (int k = 0; k <= mesh.spec().n_s; ++k) {
                    if (!mesh.solvent(i, j, k))
                        continue;
                    const double want = payoff(mesh.price(k), p);
                    const double scale = 1.0 + std::abs(mesh.node_wealth(i, j, k)) + want;
                    CHECK(std::abs(script[mesh.stack_index(i, j, k)] - want) <= 1e-10 * scale);
                }
    }
}

TEST_CASE("price surface basics") {
    const ModelParams p = reference_params();
    const Mesh3D mesh = Mesh3D::build(GridSpec{}, p);
    const auto u = UtilityFunction::exponential(0.1);
    const auto [v0, r0] = solve(mesh, p, SolverParams{}, u, 0);
    const auto [vd, rd] = solve(mesh, p, SolverParams{}, u, -1);

    SUBCASE("identical fields price to zero") {
        const PriceSurface surf = indifference_price(v0, v0, u, p, mesh);
        for (double x : surf.price)
            CHECK(x == 0.0);
    }

    SUBCASE("swapping the fields flips the sign exactly") {
        const PriceSurface ab = indifference_price(v0, vd, u, p, mesh);
        const PriceSurface ba = indifference_price(vd, v0, u, p, mesh);
        for (std::size_t c = 0; c < mesh.node_count(); ++c)
            CHECK(ab.price[c] == -ba.price[c]);
    }

    SUBCASE("buyer price of a nonnegative payoff is nonnegative") {
        const PriceSurface surf = indifference_price(v0, vd, u, p, mesh);
        for (std::size_t c = 0; c < mesh.node_count(); ++c)
            CHECK(surf.price[c] >= -1e-6 * p.strike);
    }

    SUBCASE("mismatched time levels are rejected") {
        ValueField shifted = vd;
        shifted.time_index = 1;
        CHECK_THROWS_AS(indifference_price(v0, shifted, u, p, mesh), ContractViolation);
    }
}

TEST_CASE("buyer put prices pin to the discounted strike at S = 0") {
    ModelParams p = reference_params();
    p.payoff_kind = PayoffKind::Put;
    const Mesh3D mesh = Mesh3D::build(GridSpec{}, p);
    const auto u = UtilityFunction::linear();
    const auto [v0, r0] = solve(mesh, p, SolverParams{}, u, 0);
    const auto [vd, rd] = solve(mesh, p, SolverParams{}, u, -1);
    const PriceSurface surf = indifference_price(v0, vd, u, p, mesh);

    const double disc = std::exp(-p.r * p.maturity);
    for (int i = 0; i <= mesh.spec().n_alpha; ++i)
        for (int j = 0; j <= mesh.spec().n_beta; ++j) {
            if (!mesh.solvent(i, j, 0))
                continue;
            // S = 0 sits on the Dirichlet boundary, where the certainty
            // equivalents differ by exactly the payoff
            CHECK(surf.price[mesh.stack_index(i, j, 0)] ==
                  doctest::Approx(disc * p.strike).epsilon(1e-12));
        }
    for (std::size_t c = 0; c < mesh.node_count(); ++c)
        CHECK(surf.price[c] >= -1e-6 * p.strike);
}

TEST_CASE("linear utility and r = mu make the price an undiscounted difference") {
    ModelParams p = reference_params();
    p.r = p.mu; // discount and growth cancel
    const Mesh3D mesh = Mesh3D::build(GridSpec{}, p);
    const auto u = UtilityFunction::linear();
    const auto [v0, r0] = solve(mesh, p, SolverParams{}, u, 0);
    const auto [vd, rd] = solve(mesh, p, SolverParams{}, u, -1);
    const PriceSurface surf = indifference_price(v0, vd, u, p, mesh);
    const double disc = std::exp(-p.r * p.maturity);
    for (std::size_t c = 0; c < mesh.node_count(); ++c) {
        if (mesh.kind(c) == NodeKind::Insolvent)
            continue;
        CHECK(surf.price[c] == doctest::Approx(disc * (v0[c] - vd[c])).epsilon(1e-12));
    }
}

TEST_CASE("upper-bound checker flags planted violations and accepts the closed form") {
    const ModelParams p = reference_params();
    const Mesh3D mesh = Mesh3D::build(GridSpec{}, p);
    const auto u = UtilityFunction::exponential(0.1);
    const auto [v0, r0] = solve(mesh, p, SolverParams{}, u, 0);
    const auto [vd, rd] = solve(mesh, p, SolverParams{}, u, -1);
    PriceSurface surf = indifference_price(v0, vd, u, p, mesh);

    const Prop1Report clean = check_prop1(surf, mesh, p, u);
    CHECK(clean.applicable);
    CHECK(clean.nodes_checked > 0);

    // push the recovered field above the bound everywhere: every checked node
    // must now violate
    PriceSurface bumped = surf;
    for (auto& x : bumped.script_vdelta)
        x += 10.0 * p.strike;
    const Prop1Report dirty = check_prop1(bumped, mesh, p, u);
    CHECK(dirty.violations == dirty.nodes_checked);
    CHECK(dirty.max_excess > clean.max_excess + 9.0 * p.strike);

    const auto pow_u = UtilityFunction::power(0.5);
    CHECK_FALSE(check_prop1(surf, mesh, p, pow_u).applicable);
}

TEST_CASE("degeneration checker is gated on linear utility without costs") {
    ModelParams p = reference_params();
    const Mesh3D mesh = Mesh3D::build(GridSpec{}, p);
    const auto u = UtilityFunction::exponential(0.1);
    const auto [v0, r0] = solve(mesh, p, SolverParams{}, u, 0);
    const PriceSurface surf = indifference_price(v0, v0, u, p, mesh);
    CHECK_FALSE(check_prop2(surf, mesh, p, u, 40.0, 60.0).applicable);
    CHECK_FALSE(
        check_prop2(surf, mesh, p, UtilityFunction::linear(), 40.0, 60.0).applicable);
    ModelParams free_p = p;
    free_p.theta = 0.0;
    CHECK(check_prop2(surf, mesh, free_p, UtilityFunction::linear(), 40.0, 60.0).applicable);
}
