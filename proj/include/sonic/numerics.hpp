#pragma once

#include <cmath>
#include <vector>

#include "sonic/grid.hpp"

namespace sonic {

/// r^{n-1}
inline double radial_weight(double r, int n) {
    switch (n) {
        case 1: return 1.0;
        case 2: return r;
        case 3: return r * r;
        default: return std::pow(r, n - 1);
    }
}

/// Geometric source (n-1)(n-2) r^{n-3}; vanishes for n <= 2, equals 2 for n = 3.
inline double geometric_source(double r, int n) {
    const double s = static_cast<double>((n - 1) * (n - 2));
    if (s == 0.0) return 0.0;
    if (n == 3) return s;
    return s * std::pow(r, n - 3);
}

/// Nodal first derivative on an arbitrary strictly increasing grid:
/// three-point centered formula in the interior, one-sided second-order
/// formulas at the two endpoints.
std::vector<double> nodal_derivative(const RadialGrid& grid, const std::vector<double>& y);

/// Trapezoidal integral over the whole grid.
double trapz(const RadialGrid& grid, const std::vector<double>& y);

/// Cumulative trapezoidal integral; result[i] = integral from r0 to node i.
std::vector<double> cumtrapz(const RadialGrid& grid, const std::vector<double>& y);

}  // namespace sonic
