#pragma once

#include <optional>
#include <vector>

#include "sonic/linbvp.hpp"
#include "sonic/model.hpp"
#include "sonic/solution.hpp"

namespace sonic {

/// Iterate left the invariant box (ellipticity would fail).
class IterateOutOfBandError : public std::runtime_error {
public:
    explicit IterateOutOfBandError(const std::string& what) : std::runtime_error(what) {}
};

struct SubsonicParams {
    double picard_tol = 1e-10;
    int picard_max_iter = 200;
    /// Gaps sigma_t with j_t^2 = J^2 (1 - sigma_t).
    std::vector<double> sigma_schedule = default_sigma_schedule();
    double continuation_tol = 1e-8;
    bool clamp = true;  // project iterates into [J, N]
    bool upwind = false;

    static std::vector<double> default_sigma_schedule();  // 0.5 * 4^{-t}, t = 0..14
};

/// Maximum-principle ceiling: N = Bsup + 1/tau (n=2), N = calBsup (n=3).
/// Throws HypothesisError when the subsonic hypotheses fail.
double upper_bound_N(const ProblemConfig& config, const DopingProfile& doping);

/// One frozen-coefficient step: solve the linear system obtained from the
/// regularized equation by freezing m_bar in the coefficients,
///   [r^{n-1}(1/mb - j^2/mb^3) m']' - (r^{n-1} J / (tau mb^2)) m' - m = f,
///   f = -B - (n-1) r^{n-2} J/(tau mb) + (n-1)(n-2) r^{n-3},
/// Dirichlet value J at both ends; clamped into [J, N] when requested.
Profile linearized_step(const Profile& m_bar, double j, const ProblemConfig& config,
                        const DopingProfile& doping, const SubsonicParams& params,
                        double box_N, long* clamp_count = nullptr,
                        double* clamp_max = nullptr);

struct RegularizedResult {
    Profile m;
    int iterations = 0;
    long clamp_count = 0;
    double clamp_max = 0.0;
};

/// Picard iteration of linearized_step at fixed 0 < j < J until the sup-norm
/// change drops below picard_tol.
RegularizedResult solve_regularized(double j, const ProblemConfig& config,
                                    const DopingProfile& doping, const GridPtr& grid,
                                    const Profile& init, const SubsonicParams& params);

/// Drive j -> J^- along the sigma schedule with warm starts; returns the last
/// stage tagged subsonic with diagnostics populated.
Solution continuation_solve(const ProblemConfig& config, const DopingProfile& doping,
                            const GridPtr& grid, const SubsonicParams& params = {},
                            const std::optional<Profile>& init = std::nullopt);

/// Largest lambda with m >= J + lambda sin(pi (r-r0)/(r1-r0)) on the grid.
double fit_lambda(const Profile& m, double J);

}  // namespace sonic
