#pragma once

#include <stdexcept>
#include <string>

#include "sonic/linbvp.hpp"
#include "sonic/model.hpp"

namespace sonic {

/// The shot crossed the degenerate set (m hit the regularization parameter),
/// leaving the regime branch.
class SonicCrossingError : public std::runtime_error {
public:
    explicit SonicCrossingError(const std::string& what) : std::runtime_error(what) {}
};

/// The bracket scan found no sign change of the terminal mismatch.
class BracketError : public std::runtime_error {
public:
    explicit BracketError(const std::string& what) : std::runtime_error(what) {}
};

struct ShootingResult {
    Profile profile;
    double initial_flux = 0.0;       // F(r0) found by root-finding
    double terminal_mismatch = 0.0;  // |m(r1) - J|
    int integrator_steps = 0;
    int sign_changes = 0;            // mismatch sign changes seen in the bracket scan
};

/// Reference solution of the regularized equation by RK4 shooting on the
/// first-order system (m, F), F the radial flux:
///   F' = m - B(r) + (n-1)(n-2) r^{n-3},
///   m' = (F / r^{n-1} - Q/(tau m)) / (1/m - p^2/m^3),
/// with p = j, Q = J in the subsonic regime and p = Q = k in the supersonic
/// one. m(r0) = J is imposed and F(r0) is found by a bracketed secant
/// iteration enforcing m(r1) = J. Fixed step within each grid cell; fully
/// deterministic.
ShootingResult shoot(Regime regime, double regparam, const ProblemConfig& config,
                     const DopingProfile& doping, const GridPtr& grid,
                     int steps = 1 << 14, double tol = 1e-10);

/// Low-level entry that also admits the n = 1 reduction used by tests
/// (radial weights and geometric source switched off).
ShootingResult shoot_radial(int n, double tau, double J, Regime regime, double regparam,
                            const DopingProfile& doping, const GridPtr& grid, int steps,
                            double tol = 1e-10);

/// Full-matrix Gaussian elimination with partial pivoting on the assembled
/// system; validates thomas_solve.
Profile dense_reference_solve(const LinearBVP& bvp);

}  // namespace sonic
