#include "sonic/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sonic/common.hpp"

namespace sonic {

RadialGrid RadialGrid::uniform(double r0, double r1, std::size_t cells) {
    RadialGrid g;
    g.spacing = Spacing::Uniform;
    g.nodes.resize(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(cells);
        g.nodes[i] = r0 + (r1 - r0) * t;
    }
    g.nodes.front() = r0;
    g.nodes.back() = r1;
    g.validate();
    return g;
}

RadialGrid RadialGrid::clustered(double r0, double r1, std::size_t cells) {
    RadialGrid g;
    g.spacing = Spacing::Clustered;
    g.nodes.resize(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(cells);
        g.nodes[i] = r0 + (r1 - r0) * 0.5 * (1.0 - std::cos(std::numbers::pi * t));
    }
    g.nodes.front() = r0;
    g.nodes.back() = r1;
    g.validate();
    return g;
}

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes) {
    RadialGrid g;
    g.nodes = std::move(nodes);
    g.validate();
    // Tag as uniform when the spacing is equidistant to rounding.
    g.spacing = Spacing::Clustered;
    if (g.nodes.size() >= 2) {
        const double h = (g.nodes.back() - g.nodes.front()) /
                         static_cast<double>(g.nodes.size() - 1);
        bool equi = true;
        for (std::size_t i = 0; i + 1 < g.nodes.size(); ++i) {
            if (std::abs(g.nodes[i + 1] - g.nodes[i] - h) > 1e-12 * h) {
                equi = false;
                break;
            }
        }
        if (equi) g.spacing = Spacing::Uniform;
    }
    return g;
}

void RadialGrid::validate() const {
    if (nodes.size() < 9)
        throw DomainError("RadialGrid: at least 8 cells required, got " +
                          std::to_string(nodes.empty() ? 0 : nodes.size() - 1));
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        if (!(nodes[i] < nodes[i + 1]))
            throw DomainError("RadialGrid: nodes not strictly increasing at index " +
                              std::to_string(i));
    }
    if (!std::isfinite(nodes.front()) || !std::isfinite(nodes.back()))
        throw DomainError("RadialGrid: non-finite endpoints");
}

Profile make_profile(GridPtr grid, double fill) {
    Profile p;
    p.values.assign(grid->node_count(), fill);
    p.grid = std::move(grid);
    return p;
}

Profile make_profile(GridPtr grid, std::vector<double> values) {
    if (values.size() != grid->node_count())
        throw DomainError("Profile: value count " + std::to_string(values.size()) +
                          " does not match node count " + std::to_string(grid->node_count()));
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError("Profile: non-finite value");
    Profile p;
    p.grid = std::move(grid);
    p.values = std::move(values);
    return p;
}

bool same_grid(const Profile& p, const Profile& q) {
    if (p.grid == q.grid) return true;
    if (!p.grid || !q.grid) return false;
    return p.grid->nodes == q.grid->nodes;
}

double sup_diff(const Profile& p, const Profile& q) {
    if (!same_grid(p, q)) throw DomainError("sup_diff: profiles on different grids");
    double d = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i)
        d = std::max(d, std::abs(p.values[i] - q.values[i]));
    return d;
}

}  // namespace sonic
