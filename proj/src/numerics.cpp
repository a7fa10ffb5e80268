#include "sonic/numerics.hpp"

#include "sonic/common.hpp"

namespace sonic {

std::vector<double> nodal_derivative(const RadialGrid& grid, const std::vector<double>& y) {
    const auto& x = grid.nodes;
    const std::size_t n = x.size();
    if (y.size() != n) throw DomainError("nodal_derivative: size mismatch");
    std::vector<double> d(n);

    // Left end: second-order one-sided on (x0, x1, x2).
    {
        const double h1 = x[1] - x[0], h2 = x[2] - x[1];
        d[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[0] + (h1 + h2) / (h1 * h2) * y[1] -
               h1 / (h2 * (h1 + h2)) * y[2];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double hm = x[i] - x[i - 1], hp = x[i + 1] - x[i];
        d[i] = -hp / (hm * (hm + hp)) * y[i - 1] + (hp - hm) / (hm * hp) * y[i] +
               hm / (hp * (hm + hp)) * y[i + 1];
    }
    {
        const double h1 = x[n - 1] - x[n - 2], h2 = x[n - 2] - x[n - 3];
        d[n - 1] = (2.0 * h1 + h2) / (h1 * (h1 + h2)) * y[n - 1] -
                   (h1 + h2) / (h1 * h2) * y[n - 2] + h1 / (h2 * (h1 + h2)) * y[n - 3];
    }
    return d;
}

double trapz(const RadialGrid& grid, const std::vector<double>& y) {
    const auto& x = grid.nodes;
    if (y.size() != x.size()) throw DomainError("trapz: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        s += 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
    return s;
}

std::vector<double> cumtrapz(const RadialGrid& grid, const std::vector<double>& y) {
    const auto& x = grid.nodes;
    if (y.size() != x.size()) throw DomainError("cumtrapz: size mismatch");
    std::vector<double> s(x.size(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        s[i + 1] = s[i] + 0.5 * (y[i] + y[i + 1]) * (x[i + 1] - x[i]);
    return s;
}

}  // namespace sonic
