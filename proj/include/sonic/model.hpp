#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sonic/common.hpp"
#include "sonic/grid.hpp"

namespace sonic {

enum class Regime { Subsonic, Supersonic };

const char* regime_name(Regime r);

/// Annulus geometry, dimension, relaxation time, inflow flux and the derived
/// sonic flux constant J = j0 * r0^{n-1}.
struct ProblemConfig {
    int n = 2;      // spatial dimension, 2 or 3
    double r0 = 0;  // inner radius
    double r1 = 0;  // outer radius
    double tau = 0; // momentum relaxation time
    double j0 = 0;  // inflow flux density at the inner boundary
    double J = 0;   // sonic flux constant, derived

    ProblemConfig() = default;
    ProblemConfig(int n_, double r0_, double r1_, double tau_, double j0_);
};

/// Background ion density profile b~(r) > 0 on [r0, r1].
struct DopingProfile {
    enum class Kind { Constant, Polynomial, PiecewiseLinear };

    Kind kind = Kind::Constant;
    std::vector<double> coeffs;                      // Constant: {c}; Polynomial: c0..ck
    std::vector<std::pair<double, double>> knots;    // PiecewiseLinear: (r, value)

    static DopingProfile constant(double value);
    static DopingProfile polynomial(std::vector<double> coeffs);
    static DopingProfile piecewise_linear(std::vector<std::pair<double, double>> knots);

    double operator()(double r) const;

    /// Scale b~ by a positive factor (used by parameter sweeps).
    DopingProfile scaled(double factor) const;

    /// Positivity and knot-span checks against a concrete annulus.
    void validate(double r0, double r1) const;
};

double derive_flux_constant(const ProblemConfig& config);

/// Weight B(r) = r^{n-1} b~(r); r must lie in [r0, r1].
double eval_B(const DopingProfile& doping, const ProblemConfig& config, double r);

struct SonicDensities {
    double rho0;
    double rho1;
};

/// Boundary densities that place both boundaries exactly on the sonic line.
SonicDensities sonic_boundary_densities(const ProblemConfig& config);

struct BandExtrema {
    double B_inf;
    double B_sup;
    double calB_inf;  // inf of B(r) + 2r/tau - 2
    double calB_sup;  // sup of B(r) + 2r/tau - 2
};

/// Extrema of B and of B + 2r/tau - 2 by dense sampling with exact evaluation
/// at knots and endpoints, plus local golden-section refinement around the
/// best samples (all supported doping kinds are continuous).
BandExtrema band_extrema(const DopingProfile& doping, const ProblemConfig& config,
                         int samples = 10000);

struct HypothesisCondition {
    std::string name;
    double lhs;
    double rhs;     // always the sonic flux constant J
    double margin;  // lhs - rhs
    bool satisfied; // margin > 0
};

struct HypothesisReport {
    Regime regime;
    int n;
    std::vector<HypothesisCondition> conditions;
    double B_inf;
    double B_sup;
    std::optional<double> calB_inf;  // present iff n == 3
    std::optional<double> calB_sup;

    bool satisfied() const;
};

HypothesisReport check_subsonic_hypotheses(const ProblemConfig& config,
                                           const DopingProfile& doping);
HypothesisReport check_supersonic_hypotheses(const ProblemConfig& config,
                                             const DopingProfile& doping);

/// Solver precondition failure; carries the offending report.
class HypothesisError : public std::runtime_error {
public:
    HypothesisError(std::string what, HypothesisReport report)
        : std::runtime_error(std::move(what)), report(std::move(report)) {}
    HypothesisReport report;
};

}  // namespace sonic
