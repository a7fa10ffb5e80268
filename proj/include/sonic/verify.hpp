#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sonic/fields.hpp"
#include "sonic/grid.hpp"
#include "sonic/model.hpp"
#include "sonic/solution.hpp"

namespace sonic {

/// Weak-form residual of the degenerate equation against interior hat test
/// functions, written through w = (m-J)^2 with cellwise differences and
/// midpoint quadrature. Returns (linf, l2) of |R_i| / hbar_i.
/// Requires m > 0 and boundary values exactly J.
///
/// With window_fraction > 0, the norms run only over hats centered in
/// [r0 + f L, r1 - f L]. At a sonic boundary the per-hat residual density is
/// dominated by quadrature noise of the square-root layer (it grows like
/// h_local^{-1/2} under refinement, for the exact solution as well), so the
/// all-hat sup norm does not converge; the windowed norms do.
std::pair<double, double> weak_residual(const Profile& m, const ProblemConfig& config,
                                        const DopingProfile& doping,
                                        double window_fraction = 0.0);

/// Default interior window used by the verification gate. Calibrated on the
/// canonical examples: the windowed residual decays by 4x per refinement for
/// every run while narrower windows are still contaminated by the layer tail.
inline constexpr double kWeakResidualWindow = 0.25;

/// Residual of the energy identity obtained by multiplying the regularized
/// equation by (m_j - J); the four terms are integrated by the trapezoidal
/// rule and the absolute sum is normalized by the largest term magnitude.
/// Subsonic profiles only (the identity involves (m-J)^{3/2}).
double energy_identity_residual(const Profile& m_j, double j, const ProblemConfig& config,
                                const DopingProfile& doping);

/// Multi-scale C^{1/2} difference-quotient seminorm:
/// max over pairs (i, i + 2^s) of |m_a - m_c| / |a - c|^{1/2}.
double holder_seminorm(const Profile& m);

struct DominationResult {
    bool dominated;                  // p >= q - 1e-12 at every node
    std::size_t first_violation = 0; // valid when !dominated
    double violation = 0.0;          // q - p at that node
};

DominationResult check_pointwise_domination(const Profile& p, const Profile& q);

/// Defect of the first-integral form of the w-equation: G_w evaluated from
/// its definition versus G_w(r0) plus the cumulative integral of
/// sqrt(w) + J - B + (n-1)(n-2) r^{n-3}. Sup-norm, normalized by sup |G_w|.
/// Subsonic profiles only.
double gw_consistency(const Profile& m, const ProblemConfig& config,
                      const DopingProfile& doping);

/// eps = J - max m over nodes in [r0 + delta, r1 - delta].
double interior_gap(const Profile& m, double J, double delta);

/// Residual of the discrete Poisson equation (r^{n-1} E)' = r^{n-1}(rho - b~)
/// by centered differences, normalized by sup |r^{n-1}(rho - b~)|; measured
/// away from `exclude_cells` cells at each boundary.
double poisson_crosscheck(const FieldProfiles& fields, const ProblemConfig& config,
                          const DopingProfile& doping, int exclude_cells = 2);

/// Same residual measured on the fixed interior window
/// [r0 + f L, r1 - f L]; converges under refinement regardless of the
/// square-root boundary layers (the cell-count exclusion does not).
double poisson_crosscheck_window(const FieldProfiles& fields, const ProblemConfig& config,
                                 const DopingProfile& doping,
                                 double window_fraction = kWeakResidualWindow);

/// Grid-dependent pass thresholds: value(h) = coef * (1024 h / (r1 - r0)),
/// i.e. the quoted coefficient applies exactly on a 1024-cell grid.
/// Coefficients calibrated on the two canonical examples at 1024 cells.
struct VerifyThresholds {
    double weak_linf_coef = 1e-4;   // windowed weak residual
    double energy_coef = 1e-3;
    double gw_coef = 5e-2;          // n=3 canonical measures ~1.2e-2
    double poisson_coef = 1e-2;     // windowed Poisson residual
    double boundary_tol = 1e-12;
    double box_slack = 1e-9;
};

struct CheckResult {
    std::string name;
    double value;
    double threshold;
    bool pass;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    double weak_residual_linf = kNaN;           // all interior hats
    double weak_residual_l2 = kNaN;
    double weak_residual_interior_linf = kNaN;  // windowed; gated
    double energy_identity_residual = kNaN;     // subsonic only
    double holder_seminorm = kNaN;
    double lambda_star = kNaN;                  // subsonic only
    double ell = kNaN;                          // supersonic only
    double gw_defect = kNaN;                    // subsonic only
    std::vector<std::pair<double, double>> interior_gaps;  // supersonic only
    double poisson_residual = kNaN;             // windowed; gated

    bool all_pass() const;
};

/// Runs every check applicable to the solution's regime.
VerificationReport run_verification(const Solution& solution, const ProblemConfig& config,
                                    const DopingProfile& doping,
                                    const VerifyThresholds& thresholds = {});

}  // namespace sonic
