#include "sonic/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sonic/numerics.hpp"
#include "sonic/subsonic.hpp"

namespace sonic {

std::pair<double, double> weak_residual(const Profile& m, const ProblemConfig& config,
                                        const DopingProfile& doping,
                                        double window_fraction) {
    const auto& x = m.grid->nodes;
    const std::size_t nn = x.size();
    const double J = config.J;
    if (m.values.front() != J || m.values.back() != J)
        throw DomainError("weak_residual: boundary values must equal J exactly");
    for (double v : m.values)
        if (!(v > 0.0)) throw DomainError("weak_residual: nonpositive m");

    std::vector<double> w(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        const double d = m.values[i] - J;
        w[i] = d * d;
    }

    // Per-cell flux at the midpoint, with w_r from the cellwise difference.
    std::vector<double> flux(nn - 1), src(nn - 1);
    for (std::size_t c = 0; c + 1 < nn; ++c) {
        const double h = x[c + 1] - x[c];
        const double rm = 0.5 * (x[c] + x[c + 1]);
        const double mm = 0.5 * (m.values[c] + m.values[c + 1]);
        const double wr = (w[c + 1] - w[c]) / h;
        const double rw = radial_weight(rm, config.n);
        flux[c] = rw * ((mm + J) * wr / (2.0 * mm * mm * mm) + J / (config.tau * mm));
        src[c] = mm - eval_B(doping, config, rm) + geometric_source(rm, config.n);
    }

    const double lo = x.front() + window_fraction * (x.back() - x.front());
    const double hi = x.back() - window_fraction * (x.back() - x.front());
    double linf = 0.0, sumsq = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 1; i + 1 < nn; ++i) {
        if (x[i] < lo || x[i] > hi) continue;
        const double hm = x[i] - x[i - 1];
        const double hp = x[i + 1] - x[i];
        const double hbar = 0.5 * (hm + hp);
        const double R = (flux[i - 1] - flux[i]) + 0.5 * (src[i - 1] * hm + src[i] * hp);
        const double scaled = std::abs(R) / hbar;
        linf = std::max(linf, scaled);
        sumsq += scaled * scaled;
        ++counted;
    }
    if (counted == 0) throw DomainError("weak_residual: window excludes every hat");
    return {linf, std::sqrt(sumsq / static_cast<double>(counted))};
}

double energy_identity_residual(const Profile& m_j, double j, const ProblemConfig& config,
                                const DopingProfile& doping) {
    const auto& grid = *m_j.grid;
    const auto& x = grid.nodes;
    const std::size_t nn = x.size();
    const double J = config.J;

    std::vector<double> z(nn);  // (m - J)^{3/2}
    for (std::size_t i = 0; i < nn; ++i) {
        const double d = std::max(0.0, m_j.values[i] - J);
        z[i] = d * std::sqrt(d);
    }
    const std::vector<double> mr = nodal_derivative(grid, m_j.values);
    const std::vector<double> zr = nodal_derivative(grid, z);

    std::vector<double> g1(nn), g2(nn), g3(nn), g4(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        const double r = x[i];
        const double mv = m_j.values[i];
        const double rw = radial_weight(r, config.n);
        const double m3 = mv * mv * mv;
        g1[i] = rw * mr[i] * mr[i] / m3;
        g2[i] = rw * (mv + J) / m3 * zr[i] * zr[i];
        g3[i] = rw * mr[i] / mv;
        g4[i] = (mv - eval_B(doping, config, r) + geometric_source(r, config.n)) * (mv - J);
    }
    const double T1 = (J * J - j * j) * trapz(grid, g1);
    const double T2 = 4.0 / 9.0 * trapz(grid, g2);
    const double T3 = J / config.tau * trapz(grid, g3);
    const double T4 = trapz(grid, g4);
    const double scale = std::max({std::abs(T1), std::abs(T2), std::abs(T3), std::abs(T4)});
    return scale > 0.0 ? std::abs(T1 + T2 + T3 + T4) / scale : 0.0;
}

double holder_seminorm(const Profile& m) {
    const auto& x = m.grid->nodes;
    const std::size_t nn = x.size();
    double best = 0.0;
    for (std::size_t stride = 1; stride < nn; stride *= 2) {
        for (std::size_t i = 0; i + stride < nn; ++i) {
            const double num = std::abs(m.values[i + stride] - m.values[i]);
            const double den = std::sqrt(x[i + stride] - x[i]);
            best = std::max(best, num / den);
        }
    }
    return best;
}

DominationResult check_pointwise_domination(const Profile& p, const Profile& q) {
    if (!same_grid(p, q)) throw DomainError("check_pointwise_domination: grid mismatch");
    DominationResult res{true, 0, 0.0};
    for (std::size_t i = 0; i < p.values.size(); ++i) {
        if (p.values[i] < q.values[i] - 1e-12) {
            res.dominated = false;
            res.first_violation = i;
            res.violation = q.values[i] - p.values[i];
            return res;
        }
    }
    return res;
}

double gw_consistency(const Profile& m, const ProblemConfig& config,
                      const DopingProfile& doping) {
    const auto& grid = *m.grid;
    const auto& x = grid.nodes;
    const std::size_t nn = x.size();
    const double J = config.J;

    std::vector<double> w(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        const double d = m.values[i] - J;
        w[i] = d * d;
    }
    const std::vector<double> wr = nodal_derivative(grid, w);

    std::vector<double> G(nn), rhs_integrand(nn);
    for (std::size_t i = 0; i < nn; ++i) {
        const double r = x[i];
        const double sw = std::sqrt(std::max(0.0, w[i]));
        const double rw = radial_weight(r, config.n);
        const double denom = (sw + J);
        G[i] = rw * (sw + 2.0 * J) * wr[i] / (2.0 * denom * denom * denom) +
               rw * J / (config.tau * denom);
        rhs_integrand[i] =
            sw + J - eval_B(doping, config, r) + geometric_source(r, config.n);
    }
    const std::vector<double> cum = cumtrapz(grid, rhs_integrand);

    double defect = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < nn; ++i) {
        defect = std::max(defect, std::abs(G[i] - (G[0] + cum[i])));
        scale = std::max(scale, std::abs(G[i]));
    }
    return scale > 0.0 ? defect / scale : defect;
}

double interior_gap(const Profile& m, double J, double delta) {
    const auto& x = m.grid->nodes;
    const double r0 = x.front(), r1 = x.back();
    if (!(delta > 0.0 && delta < 0.5 * (r1 - r0)))
        throw DomainError("interior_gap: delta outside (0, (r1-r0)/2)");
    double mmax = -std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] >= r0 + delta && x[i] <= r1 - delta) {
            mmax = std::max(mmax, m.values[i]);
            found = true;
        }
    }
    if (!found) throw DomainError("interior_gap: empty interior window");
    return J - mmax;
}

namespace {

double poisson_defect(const FieldProfiles& fields, const ProblemConfig& config,
                      const DopingProfile& doping,
                      const std::function<bool(std::size_t, double)>& in_window) {
    const auto& grid = *fields.E.grid;
    const auto& x = grid.nodes;
    const std::size_t nn = x.size();

    std::vector<double> q(nn);
    for (std::size_t i = 0; i < nn; ++i)
        q[i] = radial_weight(x[i], config.n) * fields.E.values[i];
    const std::vector<double> qr = nodal_derivative(grid, q);

    double defect = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < nn; ++i) {
        const double target =
            radial_weight(x[i], config.n) * (fields.rho.values[i] - doping(x[i]));
        scale = std::max(scale, std::abs(target));
        if (!in_window(i, x[i])) continue;
        defect = std::max(defect, std::abs(qr[i] - target));
    }
    return scale > 0.0 ? defect / scale : defect;
}

}  // namespace

double poisson_crosscheck(const FieldProfiles& fields, const ProblemConfig& config,
                          const DopingProfile& doping, int exclude_cells) {
    const std::size_t nn = fields.E.grid->node_count();
    const std::size_t excl = static_cast<std::size_t>(exclude_cells);
    return poisson_defect(fields, config, doping, [&](std::size_t i, double) {
        return i >= excl && i + excl < nn;
    });
}

double poisson_crosscheck_window(const FieldProfiles& fields, const ProblemConfig& config,
                                 const DopingProfile& doping, double window_fraction) {
    const auto& x = fields.E.grid->nodes;
    const double lo = x.front() + window_fraction * (x.back() - x.front());
    const double hi = x.back() - window_fraction * (x.back() - x.front());
    return poisson_defect(fields, config, doping,
                          [&](std::size_t, double r) { return r >= lo && r <= hi; });
}

bool VerificationReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

VerificationReport run_verification(const Solution& solution, const ProblemConfig& config,
                                    const DopingProfile& doping,
                                    const VerifyThresholds& thr) {
    VerificationReport rep;
    const auto& x = solution.m.grid->nodes;
    const double L = config.r1 - config.r0;
    const double h_rel = 1024.0 * (L / static_cast<double>(x.size() - 1)) / L;
    const auto add = [&rep](const std::string& name, double value, double threshold,
                            bool pass) {
        rep.checks.push_back({name, value, threshold, pass});
    };

    const double bdry =
        std::max(std::abs(solution.m.values.front() - config.J),
                 std::abs(solution.m.values.back() - config.J));
    add("boundary_exactness", bdry, thr.boundary_tol, bdry <= thr.boundary_tol);

    std::tie(rep.weak_residual_linf, rep.weak_residual_l2) =
        weak_residual(solution.m, config, doping);
    rep.weak_residual_interior_linf =
        weak_residual(solution.m, config, doping, kWeakResidualWindow).first;
    const double weak_thr = thr.weak_linf_coef * h_rel;
    add("weak_residual_interior_linf", rep.weak_residual_interior_linf, weak_thr,
        rep.weak_residual_interior_linf <= weak_thr);

    rep.holder_seminorm = holder_seminorm(solution.m);

    const FieldProfiles fields = reconstruct(solution.m, config);
    rep.poisson_residual = poisson_crosscheck_window(fields, config, doping);
    const double poisson_thr = thr.poisson_coef * h_rel;
    add("poisson_crosscheck_interior", rep.poisson_residual, poisson_thr,
        rep.poisson_residual <= poisson_thr);

    if (solution.regime == Regime::Subsonic) {
        double interior_min = std::numeric_limits<double>::infinity();
        double overall_max = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < solution.m.values.size(); ++i)
            interior_min = std::min(interior_min, solution.m.values[i] - config.J);
        for (double v : solution.m.values) overall_max = std::max(overall_max, v);
        add("interior_sign_m_minus_J", interior_min, 0.0, interior_min > 0.0);

        try {
            const double N = upper_bound_N(config, doping);
            add("box_upper_bound", overall_max, N + thr.box_slack,
                overall_max <= N + thr.box_slack);
        } catch (const HypothesisError&) {
            // Imported profile with a config that fails the gate: report only.
        }

        rep.lambda_star = fit_lambda(solution.m, config.J);
        add("lambda_star_positive", rep.lambda_star, 0.0, rep.lambda_star > 0.0);

        rep.gw_defect = gw_consistency(solution.m, config, doping);
        const double gw_thr = thr.gw_coef * h_rel;
        add("gw_consistency", rep.gw_defect, gw_thr, rep.gw_defect <= gw_thr);

        if (std::isfinite(solution.reg_param)) {
            rep.energy_identity_residual =
                energy_identity_residual(solution.m, solution.reg_param, config, doping);
            const double e_thr = thr.energy_coef * h_rel;
            add("energy_identity", rep.energy_identity_residual, e_thr,
                rep.energy_identity_residual <= e_thr);
        }
    } else {
        double interior_max = -std::numeric_limits<double>::infinity();
        double overall_min = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < solution.m.values.size(); ++i)
            interior_max = std::max(interior_max, solution.m.values[i]);
        for (double v : solution.m.values) overall_min = std::min(overall_min, v);
        add("interior_sign_J_minus_m", config.J - interior_max, 0.0,
            interior_max < config.J);

        rep.ell = overall_min;
        add("floor_positive", rep.ell, 0.0, rep.ell > 0.0);

        for (double frac : {0.1, 0.25}) {
            const double delta = frac * (config.r1 - config.r0);
            rep.interior_gaps.emplace_back(delta,
                                           interior_gap(solution.m, config.J, delta));
        }
        add("interior_gap_positive", rep.interior_gaps.front().second, 0.0,
            rep.interior_gaps.front().second > 0.0);
    }
    return rep;
}

}  // namespace sonic
