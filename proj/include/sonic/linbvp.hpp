#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sonic/grid.hpp"

namespace sonic {

/// Linear two-point boundary value problem
///   [a(r) y']' + b(r) y' + c(r) y = f(r),   y(r0) = alpha, y(r1) = beta,
/// with nodal coefficient samples. Requires a > 0 at nodes and midpoints
/// (midpoints use the arithmetic mean of nodal values) and c <= 0.
struct LinearBVP {
    enum class Advection { Central, Upwind };

    GridPtr grid;
    std::vector<double> a, b, c, f;
    double alpha = 0.0;
    double beta = 0.0;
    Advection advection = Advection::Central;
};

/// Rows for the interior nodes only; Dirichlet data folded into rhs.
struct TridiagonalSystem {
    std::vector<double> sub, diag, sup, rhs;
    std::size_t size() const { return diag.size(); }
};

class AssemblyError : public std::runtime_error {
public:
    explicit AssemblyError(const std::string& what) : std::runtime_error(what) {}
};

class SingularSystemError : public std::runtime_error {
public:
    explicit SingularSystemError(const std::string& what) : std::runtime_error(what) {}
};

/// Conservative finite-difference discretization:
///   ([a y']')_i ~ (a_{i+1/2} (y_{i+1}-y_i)/h_{i+1/2} - a_{i-1/2} (y_i-y_{i-1})/h_{i-1/2}) / hbar_i
/// with a at midpoints by arithmetic mean, b y' by central differences
/// (or monotone one-sided differences with Advection::Upwind), c y and f nodal.
TridiagonalSystem assemble(const LinearBVP& bvp);

struct TriSolveResult {
    std::vector<double> x;  // interior values
    double residual;        // ||Ax - rhs||_inf / ||rhs||_inf
};

/// Elimination without pivoting; throws SingularSystemError on a vanishing pivot.
TriSolveResult thomas_solve(const TridiagonalSystem& sys);

/// assemble + thomas_solve + boundary values attached.
Profile solve_bvp(const LinearBVP& bvp);

}  // namespace sonic
