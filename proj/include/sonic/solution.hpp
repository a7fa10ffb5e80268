#pragma once

#include <limits>
#include <vector>

#include "sonic/grid.hpp"
#include "sonic/model.hpp"

namespace sonic {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Per-solve diagnostics; fields not applicable to a regime stay NaN/empty.
struct Diagnostics {
    double weak_residual_linf = kNaN;           // all interior hats
    double weak_residual_l2 = kNaN;
    double weak_residual_interior_linf = kNaN;  // fixed interior window
    double lambda_star = kNaN;       // subsonic sine-subsolution certificate
    double ell = kNaN;               // supersonic floor min m
    double interior_gap = kNaN;      // supersonic gap at delta = (r1-r0)/10
    double holder_seminorm = kNaN;

    std::vector<int> iterations_per_stage;   // Picard (subsonic) / outer (supersonic)
    long total_inner_iterations = 0;         // supersonic only
    long bound_violation_count = 0;          // clamped nodes (subsonic) / floor breaches
    double bound_violation_max = 0.0;
    std::vector<double> stage_reg_params;    // j or k per continuation stage
    std::vector<double> stage_diffs;         // sup |m_t - m_{t-1}|
    std::vector<double> v_max_per_stage;     // supersonic running max of v
    bool continuation_converged = false;     // met continuation_tol (vs schedule end)
};

/// Converged m-profile with regime tag, final regularization parameter and
/// diagnostics.
struct Solution {
    Profile m;
    Regime regime = Regime::Subsonic;
    double reg_param = kNaN;  // final j (subsonic) or k (supersonic)
    Diagnostics diagnostics;
};

/// Nonlinear iteration failed to converge; carries the iterate history norms.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history(std::move(history)) {}
    std::vector<double> history;
};

/// Continuation aborted (stage divergence or non-monotone stall).
class ContinuationError : public std::runtime_error {
public:
    explicit ContinuationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sonic
