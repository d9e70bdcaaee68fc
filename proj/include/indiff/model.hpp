#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"

namespace indiff {

enum class PayoffKind { Call, Put };

inline const char* to_string(PayoffKind k) { return k == PayoffKind::Call ? "call" : "put"; }

/// Market constants and the option position.
///
/// delta encodes the option position held alongside the portfolio:
/// -1 short buyer position, +1 long seller position, 0 no option.
struct ModelParams {
    double mu = 0.1;       // drift per year
    double sigma = 0.3;    // volatility per sqrt-year
    double r = 0.05;       // risk-free rate per year
    double theta = 0.01;   // bid-ask spread factor, buy at (1+theta)S, sell at (1-theta)S
    double strike = 50.0;  // strike price K
    double maturity = 1.0; // maturity T in years
    int delta = -1;        // -1, 0 or +1
    PayoffKind payoff_kind = PayoffKind::Call;

    void validate() const {
        if (!(sigma > 0.0)) throw ParameterError("sigma must be positive, got " + std::to_string(sigma));
        if (!(strike > 0.0)) throw ParameterError("strike must be positive, got " + std::to_string(strike));
        if (!(maturity > 0.0)) throw ParameterError("T must be positive, got " + std::to_string(maturity));
        if (!(theta >= 0.0 && theta < 1.0))
            throw ParameterError("theta must lie in [0, 1), got " + std::to_string(theta));
        if (mu == 0.0)
            throw ParameterError("mu = 0 is not supported: the wealth shift function divides by mu");
        if (delta != -1 && delta != 0 && delta != 1)
            throw ParameterError("delta must be -1, 0 or +1, got " + std::to_string(delta));
    }
};

/// Liquid wealth of a portfolio holding alpha shares and beta in the money
/// account, when liquidation pays the bid price for long stock and the ask
/// price for covering short stock.
inline double wealth(double alpha, double beta, double s, double theta) {
    return beta + s * (alpha - theta * std::abs(alpha));
}

/// Terminal payoff C_T(s).
inline double payoff(double s, const ModelParams& p) {
    const double k = p.strike;
    return p.payoff_kind == PayoffKind::Call ? std::max(s - k, 0.0) : std::max(k - s, 0.0);
}

/// Time-dependent wealth shift A(beta, t) = (beta/mu)(r - mu)(1 - e^{-mu (T-t)}).
///
/// A(beta, T) = 0, and A vanishes identically when r = mu or beta = 0.
inline double shift_a(double beta, double t, const ModelParams& p) {
    if (p.mu == 0.0)
        throw ParameterError("shift function is singular at mu = 0");
    const double tau = p.maturity - t;
    return beta / p.mu * (p.r - p.mu) * (1.0 - std::exp(-p.mu * tau));
}

/// Standard normal CDF. erfc-based, absolute accuracy well below 1e-12.
inline double normal_cdf(double d) {
    return 0.5 * std::erfc(-d / std::sqrt(2.0));
}

/// Closed-form Black-Scholes-type value with the drift mu in place of the
/// risk-free rate, scaled by the position flag:
///   call: delta * ( s Phi(d1) - K e^{-mu tau} Phi(d2) )
///   put:  delta * ( K e^{-mu tau} Phi(-d2) - s Phi(-d1) )
/// with d_{1,2} = (ln(s/K) + (mu +- sigma^2/2) tau) / (sigma sqrt(tau)).
/// At t >= T returns delta * C_T(s).
inline double bs_closed_form(double s, double t, const ModelParams& p) {
    const double tau = p.maturity - t;
    if (tau <= 0.0)
        return static_cast<double>(p.delta) * payoff(s, p);
    if (p.delta == 0)
        return 0.0;
    const double disc = std::exp(-p.mu * tau);
    if (s <= 0.0) {
        // limiting values as s -> 0
        const double v = p.payoff_kind == PayoffKind::Call ? 0.0 : p.strike * disc;
        return static_cast<double>(p.delta) * v;
    }
    const double vol = p.sigma * std::sqrt(tau);
    const double d1 = (std::log(s / p.strike) + (p.mu + 0.5 * p.sigma * p.sigma) * tau) / vol;
    const double d2 = d1 - vol;
    double v;
    if (p.payoff_kind == PayoffKind::Call)
        v = s * normal_cdf(d1) - p.strike * disc * normal_cdf(d2);
    else
        v = p.strike * disc * normal_cdf(-d2) - s * normal_cdf(-d1);
    return static_cast<double>(p.delta) * v;
}

} // namespace indiff
