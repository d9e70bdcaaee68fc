#include <doctest.h>

#include <cmath>

#include <indiff/mc.hpp>

using namespace indiff;

namespace {

ModelParams market() {
    ModelParams p;
    p.strike = 50.0;
    p.theta = 0.01;
    return p;
}

} // namespace

TEST_CASE("degenerate diffusion gives the deterministic utility with zero error") {
    ModelParams p = market();
    p.sigma = 0.0; // the simulator itself has no positivity requirement
    const auto u = UtilityFunction::exponential(0.1);
    const McConfig mc{5000, 99, false};
    const auto res = buy_and_hold_utility(0.467, 33.3, 50.0, p, u, mc);
    const double w =
        33.3 * std::exp(p.r * p.maturity) + 50.0 * std::exp(p.mu * p.maturity) * (0.467 - p.theta * 0.467);
    CHECK(res.std_error == 0.0);
    CHECK(res.mean == doctest::Approx(u.value(w)).epsilon(1e-14));
}

TEST_CASE("linear utility mean approaches the lognormal identity") {
    ModelParams p = market();
    p.theta = 0.0;
    const auto u = UtilityFunction::linear();
    const McConfig mc{200000, 12345, false};
    const double alpha = 0.467, beta = 33.3, s = 50.0;
    const auto res = buy_and_hold_utility(alpha, beta, s, p, u, mc);
    const double want = beta * std::exp(p.r * p.maturity) + alpha * s * std::exp(p.mu * p.maturity);
    CHECK(res.std_error > 0.0);
    CHECK(std::abs(res.mean - want) <= 4.0 * res.std_error);
}

TEST_CASE("fixed seeds reproduce bit-identical results") {
    const ModelParams p = market();
    const auto u = UtilityFunction::exponential(0.1);
    const McConfig mc{20000, 7, true};
    const auto a = buy_and_hold_utility(0.467, 33.3, 50.0, p, u, mc);
    const auto b = buy_and_hold_utility(0.467, 33.3, 50.0, p, u, mc);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);

    McConfig other = mc;
    other.seed = 8;
    const auto c = buy_and_hold_utility(0.467, 33.3, 50.0, p, u, other);
    CHECK(a.mean != c.mean);
}

TEST_CASE("antithetic pairing cuts the error of the linear estimate") {
    ModelParams p = market();
    p.theta = 0.0;
    const auto u = UtilityFunction::linear();
    McConfig plain{10000, 21, false};
    McConfig anti{10000, 21, true};
    const auto res_plain = buy_and_hold_utility(0.467, 33.3, 50.0, p, u, plain);
    const auto res_anti = buy_and_hold_utility(0.467, 33.3, 50.0, p, u, anti);
    CHECK(res_anti.samples == res_plain.samples / 2);
    CHECK(res_plain.std_error / res_anti.std_error >= 1.5);
}

TEST_CASE("paths leaving the utility domain are reported") {
    ModelParams p = market();
    p.sigma = 0.0;
    const auto u = UtilityFunction::power(0.5);
    const McConfig mc{1000, 5, false};
    // short one share: terminal wealth is negative with certainty
    CHECK_THROWS_AS(buy_and_hold_utility(-1.0, 1.0, 50.0, p, u, mc), UtilityDomainError);
}
