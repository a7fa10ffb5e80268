#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace sonic {

/// Radial mesh on [r0, r1]: strictly increasing nodes with exact endpoints.
struct RadialGrid {
    enum class Spacing { Uniform, Clustered };

    std::vector<double> nodes;
    Spacing spacing = Spacing::Uniform;

    static RadialGrid uniform(double r0, double r1, std::size_t cells);
    /// Cosine-graded nodes, clustered toward both boundaries.
    static RadialGrid clustered(double r0, double r1, std::size_t cells);
    /// Adopt an existing node list (e.g. read back from a solution file).
    static RadialGrid from_nodes(std::vector<double> nodes);

    std::size_t cell_count() const { return nodes.size() - 1; }
    std::size_t node_count() const { return nodes.size(); }
    double r0() const { return nodes.front(); }
    double r1() const { return nodes.back(); }

    void validate() const;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr make_grid(RadialGrid g) {
    return std::make_shared<const RadialGrid>(std::move(g));
}

/// Real-valued function sampled at the nodes of a radial grid.
struct Profile {
    GridPtr grid;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

Profile make_profile(GridPtr grid, double fill = 0.0);
Profile make_profile(GridPtr grid, std::vector<double> values);

/// True if both profiles live on the same node set (shared pointer or equal nodes).
bool same_grid(const Profile& p, const Profile& q);

/// Max-norm of the nodewise difference; throws DomainError on grid mismatch.
double sup_diff(const Profile& p, const Profile& q);

}  // namespace sonic
