#include "sonic/supersonic.hpp"

#include <algorithm>
#include <cmath>

#include "sonic/logging.hpp"
#include "sonic/numerics.hpp"
#include "sonic/verify.hpp"

namespace sonic {

std::vector<double> SupersonicParams::default_k0_schedule() {
    std::vector<double> s;
    double gap = 0.5;
    for (int t = 0; t <= 14; ++t, gap *= 0.25) s.push_back(1.0 + gap);
    return s;
}

Profile to_v(const Profile& m, double k) {
    Profile v = m;
    for (double& val : v.values) {
        if (!(val > 0.0)) throw DomainError("to_v: nonpositive profile value");
        val = k / val;
    }
    return v;
}

Profile from_v(const Profile& v, double k) {
    Profile m = v;
    for (double& val : m.values) {
        if (!(val > 0.0)) throw DomainError("from_v: nonpositive profile value");
        val = k / val;
    }
    return m;
}

Profile inner_step(const Profile& xi, const Profile& eta, double k,
                   const ProblemConfig& config, const DopingProfile& doping,
                   const SupersonicParams& params) {
    if (!same_grid(xi, eta)) throw DomainError("inner_step: grid mismatch");
    const auto& x = xi.grid->nodes;
    const std::size_t nn = x.size();
    const double k0 = k / config.J;

    LinearBVP bvp;
    bvp.grid = xi.grid;
    bvp.advection = params.upwind ? LinearBVP::Advection::Upwind
                                  : LinearBVP::Advection::Central;
    bvp.a.resize(nn);
    bvp.b.resize(nn);
    bvp.c.assign(nn, 0.0);
    bvp.f.resize(nn);
    bvp.alpha = k0;
    bvp.beta = k0;

    const int n = config.n;
    for (std::size_t i = 0; i < nn; ++i) {
        const double r = x[i];
        const double xv = xi.values[i];
        const double ev = eta.values[i];
        if (xv <= 1.0)
            throw IterateBelowSonicError("inner_step: iterate at or below sonic at node " +
                                         std::to_string(i));
        const double w = radial_weight(r, n);
        bvp.a[i] = w * (ev + 1.0) * (xv - 1.0) / ev;
        bvp.b[i] = w / config.tau;
        const double G = eval_B(doping, config, r) - geometric_source(r, n) +
                         (n - 1) * radial_weight(r, n - 1) * ev / config.tau - k / ev;
        bvp.f[i] = -G;
    }
    return solve_bvp(bvp);
}

Profile outer_step(const Profile& eta, double k, const ProblemConfig& config,
                   const DopingProfile& doping, const SupersonicParams& params,
                   int* inner_iterations) {
    const double k0 = k / config.J;
    Profile xi = eta;
    std::vector<double> history;
    for (int it = 0; it < params.inner_max_iter; ++it) {
        Profile next = inner_step(xi, eta, k, config, doping, params);
        const double diff = sup_diff(next, xi);
        history.push_back(diff);
        xi = std::move(next);
        if (inner_iterations) *inner_iterations = it + 1;
        if (diff < params.inner_tol) {
            // Maximum-principle floor: v >= k0 up to tolerance.
            for (std::size_t i = 0; i < xi.values.size(); ++i) {
                if (xi.values[i] < k0 - params.floor_tol)
                    throw MaxPrincipleBreachError(
                        "outer_step: v dropped to " + std::to_string(xi.values[i]) +
                            " < k0 = " + std::to_string(k0) + " at node " + std::to_string(i),
                        i);
            }
            return xi;
        }
    }
    throw DivergenceError("outer_step: inner loop did not converge at k = " +
                              std::to_string(k) + ", last sup-change " +
                              std::to_string(history.back()),
                          history);
}

SupersonicRegularizedResult solve_regularized_supersonic(
    double k, const ProblemConfig& config, const DopingProfile& doping,
    const GridPtr& grid, const SupersonicParams& params,
    const std::optional<Profile>& warm_start_v) {
    if (!(k > config.J))
        throw DomainError("solve_regularized_supersonic: need k > J");
    const double k0 = k / config.J;

    SupersonicRegularizedResult out;
    Profile eta = warm_start_v ? *warm_start_v : make_profile(grid, k0);
    // A warm start from a previous stage has boundary values of the old k0.
    eta.values.front() = k0;
    eta.values.back() = k0;
    for (double& v : eta.values) v = std::max(v, k0);

    out.v_max = *std::max_element(eta.values.begin(), eta.values.end());
    std::vector<double> history;
    for (int it = 0; it < params.outer_max_iter; ++it) {
        int inner = 0;
        Profile v = outer_step(eta, k, config, doping, params, &inner);
        out.inner_iterations += inner;
        out.v_max = std::max(out.v_max, *std::max_element(v.values.begin(), v.values.end()));
        const double diff = sup_diff(v, eta);
        history.push_back(diff);
        if (params.relaxation < 1.0) {
            for (std::size_t i = 0; i < eta.values.size(); ++i)
                eta.values[i] += params.relaxation * (v.values[i] - eta.values[i]);
        } else {
            eta = std::move(v);
        }
        out.outer_iterations = it + 1;
        if (diff < params.outer_tol) {
            out.v = std::move(eta);
            out.m = from_v(out.v, k);
            // Boundary data is exactly J by construction.
            out.m.values.front() = config.J;
            out.m.values.back() = config.J;
            return out;
        }
    }
    throw DivergenceError("solve_regularized_supersonic: outer loop did not converge at k = " +
                              std::to_string(k) + ", last sup-change " +
                              std::to_string(history.back()),
                          history);
}

Solution continuation_solve_supersonic(const ProblemConfig& config,
                                       const DopingProfile& doping, const GridPtr& grid,
                                       const SupersonicParams& params) {
    const HypothesisReport rep = check_supersonic_hypotheses(config, doping);
    if (!rep.satisfied())
        throw HypothesisError("continuation_solve_supersonic: hypotheses unsatisfied", rep);

    Solution sol;
    sol.regime = Regime::Supersonic;
    std::optional<Profile> warm_v;
    Profile current_m;
    int increase_streak = 0;

    for (std::size_t t = 0; t < params.k0_schedule.size(); ++t) {
        const double k0 = params.k0_schedule[t];
        if (!(k0 > 1.0))
            throw DomainError("continuation_solve_supersonic: k0 must exceed 1");
        const double k = config.J * k0;
        SupersonicRegularizedResult stage =
            solve_regularized_supersonic(k, config, doping, grid, params, warm_v);
        sol.diagnostics.iterations_per_stage.push_back(stage.outer_iterations);
        sol.diagnostics.total_inner_iterations += stage.inner_iterations;
        sol.diagnostics.stage_reg_params.push_back(k);
        sol.diagnostics.v_max_per_stage.push_back(stage.v_max);
        sol.reg_param = k;

        if (t > 0) {
            const double diff = sup_diff(stage.m, current_m);
            if (!sol.diagnostics.stage_diffs.empty() &&
                diff > sol.diagnostics.stage_diffs.back())
                ++increase_streak;
            else
                increase_streak = 0;
            sol.diagnostics.stage_diffs.push_back(diff);
            log::info("supersonic stage ", t, ": k0 = ", k0, ", diff = ", diff,
                      ", outer iters = ", stage.outer_iterations);
            current_m = std::move(stage.m);
            warm_v = std::move(stage.v);
            if (diff < params.continuation_tol) {
                sol.diagnostics.continuation_converged = true;
                break;
            }
            if (increase_streak >= 3)
                throw ContinuationError(
                    "continuation_solve_supersonic: stage differences increased for 3 stages");
        } else {
            current_m = std::move(stage.m);
            warm_v = std::move(stage.v);
        }
    }

    sol.m = std::move(current_m);
    // Sonic contact inside the domain at the final stage is a degeneracy.
    for (std::size_t i = 1; i + 1 < sol.m.values.size(); ++i)
        if (sol.m.values[i] >= config.J - 1e-12)
            log::error("continuation_solve_supersonic: interior node ", i,
                       " within 1e-12 of the sonic value (degenerate touch)");

    const auto [linf, l2] = weak_residual(sol.m, config, doping);
    sol.diagnostics.weak_residual_linf = linf;
    sol.diagnostics.weak_residual_l2 = l2;
    sol.diagnostics.weak_residual_interior_linf =
        weak_residual(sol.m, config, doping, kWeakResidualWindow).first;
    sol.diagnostics.ell =
        *std::min_element(sol.m.values.begin(), sol.m.values.end());
    sol.diagnostics.interior_gap =
        interior_gap(sol.m, config.J, (config.r1 - config.r0) / 10.0);
    sol.diagnostics.holder_seminorm = holder_seminorm(sol.m);
    return sol;
}

}  // namespace sonic
