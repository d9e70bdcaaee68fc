#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"

namespace indiff {

enum class UtilityFamily { Linear, Exponential, Power, Logarithmic };

inline const char* to_string(UtilityFamily f) {
    switch (f) {
    case UtilityFamily::Linear: return "linear";
    case UtilityFamily::Exponential: return "exponential";
    case UtilityFamily::Power: return "power";
    case UtilityFamily::Logarithmic: return "logarithmic";
    }
    return "?";
}

/// Concave increasing utility function U with its inverse and the Arrow-Pratt
/// absolute risk-aversion coefficient R = -U''/U'.
///
/// Families:
///   linear        U(x) = x                U^-1(y) = y              R = 0
///   exponential   U(x) = 1 - e^{-g x}     U^-1(y) = -ln(1-y)/g     R = g         (g > 0)
///   power         U(x) = x^a, x > 0       U^-1(y) = y^{1/a}        R = (1-a)/x   (0 < a < 1)
///   logarithmic   U(x) = ln(b x + 1)      U^-1(y) = (e^y - 1)/b    R = b/(bx+1)  (b > 0, bx+1 > 0)
///
/// The linear family is the g -> 0 member of the exponential one; nothing
/// downstream special-cases it.
class UtilityFunction {
public:
    static UtilityFunction linear() { return UtilityFunction(UtilityFamily::Linear, 0.0); }

    static UtilityFunction exponential(double gamma) {
        if (!(gamma > 0.0))
            throw ParameterError("exponential utility requires gamma > 0, got " + std::to_string(gamma));
        return UtilityFunction(UtilityFamily::Exponential, gamma);
    }

    static UtilityFunction power(double a) {
        // Table form allows a < 1, but only 0 < a < 1 yields a strictly
        // increasing concave map, so that is what we accept.
        if (!(a > 0.0 && a < 1.0))
            throw ParameterError("power utility requires 0 < a < 1, got " + std::to_string(a));
        return UtilityFunction(UtilityFamily::Power, a);
    }

    static UtilityFunction logarithmic(double b) {
        if (!(b > 0.0))
            throw ParameterError("logarithmic utility requires b > 0, got " + std::to_string(b));
        return UtilityFunction(UtilityFamily::Logarithmic, b);
    }

    UtilityFamily family() const { return family_; }

    /// The single family parameter (gamma, a or b); 0 for the linear family.
    double param() const { return param_; }

    bool in_domain(double xi) const {
        switch (family_) {
        case UtilityFamily::Linear:
        case UtilityFamily::Exponential: return std::isfinite(xi);
        case UtilityFamily::Power: return xi > 0.0;
        case UtilityFamily::Logarithmic: return param_ * xi + 1.0 > 0.0;
        }
        return false;
    }

    bool in_range(double y) const {
        switch (family_) {
        case UtilityFamily::Linear: return std::isfinite(y);
        case UtilityFamily::Exponential: return y < 1.0;
        case UtilityFamily::Power: return y > 0.0;
        case UtilityFamily::Logarithmic: return std::isfinite(y);
        }
        return false;
    }

    double value(double xi) const {
        require_domain(xi);
        switch (family_) {
        case UtilityFamily::Linear: return xi;
        case UtilityFamily::Exponential: return 1.0 - std::exp(-param_ * xi);
        case UtilityFamily::Power: return std::pow(xi, param_);
        case UtilityFamily::Logarithmic: return std::log1p(param_ * xi);
        }
        return 0.0;
    }

    double inverse(double y) const {
        if (!in_range(y))
            throw UtilityDomainError(std::string("value ") + std::to_string(y) +
                                     " is outside the range of the " + to_string(family_) + " utility");
        switch (family_) {
        case UtilityFamily::Linear: return y;
        case UtilityFamily::Exponential: return -std::log1p(-y) / param_;
        case UtilityFamily::Power: return std::pow(y, 1.0 / param_);
        case UtilityFamily::Logarithmic: return std::expm1(y) / param_;
        }
        return 0.0;
    }

    /// Arrow-Pratt coefficient R(xi) = -U''(xi)/U'(xi).
    double risk_aversion(double xi) const {
        require_domain(xi);
        switch (family_) {
        case UtilityFamily::Linear: return 0.0;
        case UtilityFamily::Exponential: return param_;
        case UtilityFamily::Power: return (1.0 - param_) / xi;
        case UtilityFamily::Logarithmic: return param_ / (param_ * xi + 1.0);
        }
        return 0.0;
    }

private:
    UtilityFunction(UtilityFamily f, double p) : family_(f), param_(p) {}

    void require_domain(double xi) const {
        if (!in_domain(xi))
            throw UtilityDomainError(std::string("argument ") + std::to_string(xi) +
                                     " is outside the domain of the " + to_string(family_) + " utility");
    }

    UtilityFamily family_;
    double param_;
};

} // namespace indiff
