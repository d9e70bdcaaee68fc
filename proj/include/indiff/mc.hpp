#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "errors.hpp"
#include "model.hpp"
#include "utility.hpp"

namespace indiff {

struct McConfig {
    std::int64_t paths = 100000;
    std::uint64_t seed = 1;
    bool antithetic = true;
};

struct McResult {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based standard normal draw: path index -> N(0,1), independent of
/// any generator state, so runs are reproducible for a fixed seed regardless
/// of evaluation order.
inline double normal_draw(std::uint64_t seed, std::uint64_t counter) {
    const std::uint64_t a = splitmix64(seed ^ splitmix64(2 * counter));
    const std::uint64_t b = splitmix64(seed ^ splitmix64(2 * counter + 1));
    const double u1 = (double(a >> 11) + 1.0) * 0x1.0p-53; // in (0, 1]
    const double u2 = double(b >> 11) * 0x1.0p-53;         // in [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

} // namespace detail

/// Expected terminal utility of the buy-and-hold policy: hold alpha shares
/// and let the money account accrue at r, then liquidate at T. Any fixed
/// admissible policy bounds the optimal value from below, so the sample mean
/// (minus a few standard errors) must not exceed the solver's v^0.
///
/// S_T = s exp((mu - sigma^2/2) T + sigma sqrt(T) Z), beta_T = beta e^{rT},
/// W_T = beta_T + S_T (alpha - theta |alpha|).
inline McResult buy_and_hold_utility(double alpha, double beta, double s, const ModelParams& p,
                                     const UtilityFunction& u, const McConfig& mc) {
    if (mc.paths < 1)
        throw ConfigError("mc paths must be positive");
    const double beta_t = beta * std::exp(p.r * p.maturity);
    const double drift = (p.mu - 0.5 * p.sigma * p.sigma) * p.maturity;
    const double vol = p.sigma * std::sqrt(p.maturity);
    const double holding = alpha - p.theta * std::abs(alpha);

    const auto utility_at = [&](double z) {
        const double w_t = beta_t + s * std::exp(drift + vol * z) * holding;
        if (!u.in_domain(w_t))
            throw UtilityDomainError("buy-and-hold terminal wealth " + std::to_string(w_t) +
                                     " left the utility domain");
        return u.value(w_t);
    };

    const std::int64_t samples = mc.antithetic ? std::max<std::int64_t>(mc.paths / 2, 1) : mc.paths;
    double mean = 0.0, m2 = 0.0;
    for (std::int64_t n = 0; n < samples; ++n) {
        const double z = detail::normal_draw(mc.seed, std::uint64_t(n));
        const double sample =
            mc.antithetic ? 0.5 * (utility_at(z) + utility_at(-z)) : utility_at(z);
        const double delta = sample - mean;
        mean += delta / double(n + 1);
        m2 += delta * (sample - mean);
    }

    McResult res;
    res.mean = mean;
    res.samples = samples;
    res.std_error = samples > 1 ? std::sqrt(m2 / double(samples - 1) / double(samples)) : 0.0;
    return res;
}

} // namespace indiff
