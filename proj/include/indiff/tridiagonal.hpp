#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "errors.hpp"

namespace indiff {

/// Tridiagonal system A x = rhs for one (i,j) block of the scheme.
/// lower/upper have size() - 1 entries; lower[k] couples row k+1 to k,
/// upper[k] couples row k to k+1. Assembly guarantees a strictly diagonally
/// dominant M-matrix with diagonal entries >= 1.
struct TridiagonalSystem {
    std::vector<double> lower;
    std::vector<double> diag;
    std::vector<double> upper;
    std::vector<double> rhs;

    std::size_t size() const { return diag.size(); }

    void resize(std::size_t n) {
        lower.assign(n > 0 ? n - 1 : 0, 0.0);
        diag.assign(n, 0.0);
        upper.assign(n > 0 ? n - 1 : 0, 0.0);
        rhs.assign(n, 0.0);
    }
};

/// Thomas elimination, O(n). No pivoting: callers guarantee diagonal
/// dominance, and row swaps would break the linear-time contract.
inline void thomas_solve(const TridiagonalSystem& sys, std::vector<double>& x,
                         std::vector<double>& scratch) {
    const std::size_t n = sys.size();
    x.resize(n);
    scratch.resize(n);
    if (n == 0)
        return;

    // forward sweep: scratch holds the normalized super-diagonal
    double den = sys.diag[0];
    if (std::abs(den) < 1e-300)
        throw NumericalError("zero pivot in row 0");
    scratch[0] = n > 1 ? sys.upper[0] / den : 0.0;
    x[0] = sys.rhs[0] / den;
    for (std::size_t i = 1; i < n; ++i) {
        den = sys.diag[i] - sys.lower[i - 1] * scratch[i - 1];
        if (std::abs(den) < 1e-300)
            throw NumericalError("zero pivot in row " + std::to_string(i));
        scratch[i] = i + 1 < n ? sys.upper[i] / den : 0.0;
        x[i] = (sys.rhs[i] - sys.lower[i - 1] * x[i - 1]) / den;
    }
    for (std::size_t i = n - 1; i-- > 0;)
        x[i] -= scratch[i] * x[i + 1];
}

inline std::vector<double> thomas_solve(const TridiagonalSystem& sys) {
    std::vector<double> x, scratch;
    thomas_solve(sys, x, scratch);
    return x;
}

} // namespace indiff
