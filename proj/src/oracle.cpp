#include "sonic/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "sonic/common.hpp"
#include "sonic/logging.hpp"
#include "sonic/numerics.hpp"

namespace sonic {

namespace {

struct OdeSetup {
    int n;
    double tau;
    double J;
    double p;  // regularization parameter: j (subsonic) or k (supersonic)
    double Q;  // constant in the tau-term: J (subsonic) or k (supersonic)
    bool subsonic;
    const DopingProfile* doping;
};

// First-order system in (m, F); F is the bracketed radial flux.
void ode_rhs(const OdeSetup& s, double r, double m, double F, double& dm, double& dF) {
    if (!(m > 0.0)) throw SonicCrossingError("shoot: density collapsed to zero");
    const double denom = (m * m - s.p * s.p) / (m * m * m);
    if (s.subsonic) {
        if (m <= s.p * (1.0 + 1e-12))
            throw SonicCrossingError("shoot: m reached the degenerate value j");
    } else {
        if (m >= s.p * (1.0 - 1e-12))
            throw SonicCrossingError("shoot: m reached the degenerate value k");
    }
    const double w = radial_weight(r, s.n);
    const double B = w * (*s.doping)(r);
    dF = m - B + geometric_source(r, s.n);
    dm = (F / w - s.Q / (s.tau * m)) / denom;
}

void rk4_step(const OdeSetup& s, double r, double h, double& m, double& F) {
    double k1m, k1f, k2m, k2f, k3m, k3f, k4m, k4f;
    ode_rhs(s, r, m, F, k1m, k1f);
    ode_rhs(s, r + 0.5 * h, m + 0.5 * h * k1m, F + 0.5 * h * k1f, k2m, k2f);
    ode_rhs(s, r + 0.5 * h, m + 0.5 * h * k2m, F + 0.5 * h * k2f, k3m, k3f);
    ode_rhs(s, r + h, m + h * k3m, F + h * k3f, k4m, k4f);
    m += h / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
    F += h / 6.0 * (k1f + 2.0 * k2f + 2.0 * k3f + k4f);
}

// Integrate across the grid, optionally recording nodal m values.
double integrate(const OdeSetup& s, const RadialGrid& grid, int steps, double F0,
                 std::vector<double>* record) {
    const auto& x = grid.nodes;
    const double L = x.back() - x.front();
    double m = s.J;
    double F = F0;
    if (record) (*record)[0] = m;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double dx = x[i + 1] - x[i];
        const int ns = std::max(1, static_cast<int>(std::ceil(steps * dx / L - 1e-9)));
        const double h = dx / ns;
        for (int sub = 0; sub < ns; ++sub) rk4_step(s, x[i] + sub * h, h, m, F);
        if (record) (*record)[i + 1] = m;
    }
    return m - s.J;  // terminal mismatch
}

std::optional<double> try_shot(const OdeSetup& s, const RadialGrid& grid, int steps,
                               double F0) {
    try {
        return integrate(s, grid, steps, F0, nullptr);
    } catch (const SonicCrossingError&) {
        return std::nullopt;
    }
}

}  // namespace

ShootingResult shoot_radial(int n, double tau, double J, Regime regime, double regparam,
                            const DopingProfile& doping, const GridPtr& grid, int steps,
                            double tol) {
    const bool subsonic = regime == Regime::Subsonic;
    if (subsonic && !(regparam <= J * (1.0 - 1e-6) && regparam > 0.0))
        throw DomainError("shoot: subsonic requires 0 < j <= J(1 - 1e-6)");
    if (!subsonic && !(regparam >= J * (1.0 + 1e-6)))
        throw DomainError("shoot: supersonic requires k >= J(1 + 1e-6)");

    OdeSetup s{n, tau, J, regparam, subsonic ? J : regparam, subsonic, &doping};
    const auto& x = grid->nodes;
    const double r0 = x.front(), r1 = x.back();

    // Zero-slope flux at r0; admissible shots start at or above it.
    const double F_base = radial_weight(r0, n) * s.Q / (tau * J);
    double Bmax = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double r = r0 + (r1 - r0) * i / 1000.0;
        Bmax = std::max(Bmax, radial_weight(r, n) * doping(r));
    }
    const double span = 2.0 * (Bmax + J + 2.0 + 1.0 / tau) * (r1 - r0) + 1.0;

    double Fa = 0.0, Fb = 0.0, pa = 0.0, pb = 0.0;
    int sign_changes = 0;
    bool have_bracket = false;
    // Scan for a sign change; when none shows up (the admissible window gets
    // very narrow near the degenerate limit) zoom into the best |mismatch|
    // candidate and rescan.
    double lo = F_base, hi = F_base + span;
    constexpr int kScanPoints = 257;
    for (int round = 0; round < 12 && !have_bracket; ++round) {
        bool have_prev = false;
        double prevF = 0.0, prevPhi = 0.0;
        double bestF = 0.0, bestAbs = std::numeric_limits<double>::infinity();
        sign_changes = 0;
        for (int i = 0; i < kScanPoints; ++i) {
            const double F0 = lo + (hi - lo) * i / (kScanPoints - 1.0);
            const auto phi = try_shot(s, *grid, steps, F0);
            if (!phi) {
                have_prev = false;
                continue;
            }
            if (std::abs(*phi) < bestAbs) {
                bestAbs = std::abs(*phi);
                bestF = F0;
            }
            if (have_prev && ((prevPhi < 0.0) != (*phi < 0.0))) {
                ++sign_changes;
                if (!have_bracket) {
                    Fa = prevF;
                    pa = prevPhi;
                    Fb = F0;
                    pb = *phi;
                    have_bracket = true;
                }
            }
            have_prev = true;
            prevF = F0;
            prevPhi = *phi;
        }
        if (have_bracket) break;
        if (!std::isfinite(bestAbs))
            throw BracketError("shoot: every shot in [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "] left the regime branch");
        const double spacing = (hi - lo) / (kScanPoints - 1.0);
        lo = bestF - spacing;
        hi = bestF + spacing;
    }
    if (!have_bracket)
        throw BracketError("shoot: no sign change of the terminal mismatch over [" +
                           std::to_string(F_base) + ", " + std::to_string(F_base + span) + "]");
    if (sign_changes > 1)
        log::info("shoot: ", sign_changes,
                  " sign changes found; using the first bracket (possible multiplicity)");

    // Safeguarded secant on F(r0) within the bracket.
    double F_root = Fa, phi_root = pa;
    for (int it = 0; it < 200; ++it) {
        double Fn;
        if (std::abs(pb - pa) > 0.0) {
            Fn = Fb - pb * (Fb - Fa) / (pb - pa);
            const double lo = std::min(Fa, Fb), hi = std::max(Fa, Fb);
            if (!std::isfinite(Fn) || Fn <= lo || Fn >= hi) Fn = 0.5 * (Fa + Fb);
        } else {
            Fn = 0.5 * (Fa + Fb);
        }
        auto phi = try_shot(s, *grid, steps, Fn);
        if (!phi) {
            // Interior failure: fall back to bisection toward the a-side.
            Fn = 0.5 * (Fa + Fb);
            phi = try_shot(s, *grid, steps, Fn);
            if (!phi) throw BracketError("shoot: integration failed inside the bracket");
        }
        F_root = Fn;
        phi_root = *phi;
        if (std::abs(phi_root) < tol) break;
        if ((phi_root < 0.0) == (pa < 0.0)) {
            Fa = Fn;
            pa = phi_root;
        } else {
            Fb = Fn;
            pb = phi_root;
        }
    }
    if (std::abs(phi_root) >= tol)
        throw BracketError("shoot: secant failed to reach tolerance, mismatch = " +
                           std::to_string(phi_root));

    ShootingResult res;
    res.profile = make_profile(grid);
    std::vector<double> record(grid->node_count());
    integrate(s, *grid, steps, F_root, &record);
    res.profile.values = std::move(record);
    res.initial_flux = F_root;
    res.terminal_mismatch = std::abs(phi_root);
    res.integrator_steps = steps;
    res.sign_changes = std::max(sign_changes, 1);
    return res;
}

ShootingResult shoot(Regime regime, double regparam, const ProblemConfig& config,
                     const DopingProfile& doping, const GridPtr& grid, int steps,
                     double tol) {
    return shoot_radial(config.n, config.tau, config.J, regime, regparam, doping, grid,
                        steps, tol);
}

Profile dense_reference_solve(const LinearBVP& bvp) {
    const TridiagonalSystem sys = assemble(bvp);
    const std::size_t m = sys.size();
    std::vector<std::vector<double>> A(m, std::vector<double>(m, 0.0));
    std::vector<double> rhs = sys.rhs;
    for (std::size_t i = 0; i < m; ++i) {
        A[i][i] = sys.diag[i];
        if (i > 0) A[i][i - 1] = sys.sub[i];
        if (i + 1 < m) A[i][i + 1] = sys.sup[i];
    }

    for (std::size_t col = 0; col < m; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (A[piv][col] == 0.0)
            throw SingularSystemError("dense_reference_solve: singular matrix at column " +
                                      std::to_string(col));
        if (piv != col) {
            std::swap(A[piv], A[col]);
            std::swap(rhs[piv], rhs[col]);
        }
        for (std::size_t r = col + 1; r < m; ++r) {
            const double factor = A[r][col] / A[col][col];
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < m; ++c) A[r][c] -= factor * A[col][c];
            rhs[r] -= factor * rhs[col];
        }
    }
    std::vector<double> xsol(m);
    for (std::size_t i = m; i-- > 0;) {
        double sum = rhs[i];
        for (std::size_t c = i + 1; c < m; ++c) sum -= A[i][c] * xsol[c];
        xsol[i] = sum / A[i][i];
    }

    Profile p = make_profile(bvp.grid);
    p.values.front() = bvp.alpha;
    p.values.back() = bvp.beta;
    std::copy(xsol.begin(), xsol.end(), p.values.begin() + 1);
    return p;
}

}  // namespace sonic
