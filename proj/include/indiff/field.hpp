#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace indiff {

/// One time level of the discrete value function, stacked over the mesh.
/// Boundary and insolvent nodes carry their pinned values; only interior
/// entries evolve.
struct ValueField {
    std::vector<double> values;
    int time_index = 0;

    double& operator[](std::size_t flat) { return values[flat]; }
    double operator[](std::size_t flat) const { return values[flat]; }
};

inline double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

inline double inf_norm(const ValueField& f) { return inf_norm(f.values); }

} // namespace indiff
