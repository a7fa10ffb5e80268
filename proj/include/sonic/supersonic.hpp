#pragma once

#include <optional>
#include <vector>

#include "sonic/linbvp.hpp"
#include "sonic/model.hpp"
#include "sonic/solution.hpp"

namespace sonic {

/// An inner iterate dropped to or below the sonic value 1 (ellipticity loss).
class IterateBelowSonicError : public std::runtime_error {
public:
    explicit IterateBelowSonicError(const std::string& what) : std::runtime_error(what) {}
};

/// A solved v-profile fell below its boundary value k0 beyond tolerance.
class MaxPrincipleBreachError : public std::runtime_error {
public:
    MaxPrincipleBreachError(const std::string& what, std::size_t node)
        : std::runtime_error(what), node(node) {}
    std::size_t node;
};

struct SupersonicParams {
    double inner_tol = 1e-10;
    int inner_max_iter = 200;
    double outer_tol = 1e-9;
    int outer_max_iter = 200;
    /// Boundary values k0_t = k_t / J = 1 + 0.5 * 4^{-t}, t = 0..14.
    std::vector<double> k0_schedule = default_k0_schedule();
    double continuation_tol = 1e-8;
    double relaxation = 1.0;  // under-relaxation for the outer loop, (0, 1]
    bool upwind = false;
    double floor_tol = 1e-9;  // allowed undershoot of v below k0

    static std::vector<double> default_k0_schedule();
};

/// v = k/m and back; both require strictly positive input.
Profile to_v(const Profile& m, double k);
Profile from_v(const Profile& v, double k);

/// Inner linearized solve: with eta and xi frozen,
///   [r^{n-1} (eta+1)(xi-1)/eta zeta']' + (r^{n-1}/tau) zeta' = -G,
///   G = B - (n-1)(n-2) r^{n-3} + (n-1) r^{n-2} eta/tau - k/eta,
/// Dirichlet value k0 = k/J at both ends.
Profile inner_step(const Profile& xi, const Profile& eta, double k,
                   const ProblemConfig& config, const DopingProfile& doping,
                   const SupersonicParams& params);

/// Quasilinear solve with eta frozen: inner Picard loop on xi until the
/// sup-norm change drops below inner_tol. Returns v >= k0 - floor_tol.
Profile outer_step(const Profile& eta, double k, const ProblemConfig& config,
                   const DopingProfile& doping, const SupersonicParams& params,
                   int* inner_iterations = nullptr);

struct SupersonicRegularizedResult {
    Profile m;   // boundary nodes set to J exactly
    Profile v;
    int outer_iterations = 0;
    long inner_iterations = 0;
    double v_max = 0.0;
};

/// Outer Picard on eta (start v = k0 unless warm-started), then m_k = k/v_k.
SupersonicRegularizedResult solve_regularized_supersonic(
    double k, const ProblemConfig& config, const DopingProfile& doping,
    const GridPtr& grid, const SupersonicParams& params,
    const std::optional<Profile>& warm_start_v = std::nullopt);

/// Drive k -> J^+ along the k0 schedule with warm starts.
Solution continuation_solve_supersonic(const ProblemConfig& config,
                                       const DopingProfile& doping, const GridPtr& grid,
                                       const SupersonicParams& params = {});

}  // namespace sonic
