#include "sonic/subsonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sonic/logging.hpp"
#include "sonic/numerics.hpp"
#include "sonic/verify.hpp"

namespace sonic {

std::vector<double> SubsonicParams::default_sigma_schedule() {
    std::vector<double> s;
    double sigma = 0.5;
    for (int t = 0; t <= 14; ++t, sigma *= 0.25) s.push_back(sigma);
    return s;
}

double upper_bound_N(const ProblemConfig& config, const DopingProfile& doping) {
    const HypothesisReport rep = check_subsonic_hypotheses(config, doping);
    if (!rep.satisfied())
        throw HypothesisError("upper_bound_N: subsonic hypotheses unsatisfied", rep);
    const BandExtrema e = band_extrema(doping, config);
    return config.n == 2 ? e.B_sup + 1.0 / config.tau : e.calB_sup;
}

namespace {

// Linear system of the frozen-coefficient step at m_bar:
//   [r^{n-1}(1/mb - j^2/mb^3) m']' - (r^{n-1} J/(tau mb^2)) m' - m
//     = -B - (n-1) r^{n-2} J/(tau mb) + (n-1)(n-2) r^{n-3}.
LinearBVP build_linearized_bvp(const Profile& m_bar, double j, const ProblemConfig& config,
                               const DopingProfile& doping, const SubsonicParams& params) {
    const auto& x = m_bar.grid->nodes;
    const std::size_t nn = x.size();

    LinearBVP bvp;
    bvp.grid = m_bar.grid;
    bvp.advection = params.upwind ? LinearBVP::Advection::Upwind
                                  : LinearBVP::Advection::Central;
    bvp.a.resize(nn);
    bvp.b.resize(nn);
    bvp.c.resize(nn);
    bvp.f.resize(nn);
    bvp.alpha = config.J;
    bvp.beta = config.J;

    const int n = config.n;
    for (std::size_t i = 0; i < nn; ++i) {
        const double r = x[i];
        const double mb = m_bar.values[i];
        if (mb <= j)
            throw IterateOutOfBandError("linearized step: iterate below j at node " +
                                        std::to_string(i));
        const double w = radial_weight(r, n);
        bvp.a[i] = w * (1.0 / mb - j * j / (mb * mb * mb));
        bvp.b[i] = -w * config.J / (config.tau * mb * mb);
        bvp.c[i] = -1.0;
        bvp.f[i] = -eval_B(doping, config, r) -
                   (n - 1) * radial_weight(r, n - 1) * config.J / (config.tau * mb) +
                   geometric_source(r, n);
    }
    return bvp;
}

// Residual of the Picard fixed-point equation at the interior nodes:
// G(m) = A(m) m - rhs(m) with [A, rhs] the linearized system frozen at m.
std::vector<double> picard_residual(const Profile& m, double j, const ProblemConfig& config,
                                    const DopingProfile& doping,
                                    const SubsonicParams& params) {
    const TridiagonalSystem sys =
        assemble(build_linearized_bvp(m, j, config, doping, params));
    const std::size_t mi = sys.size();
    std::vector<double> G(mi);
    for (std::size_t r = 0; r < mi; ++r) {
        double acc = sys.diag[r] * m.values[r + 1];
        if (r > 0) acc += sys.sub[r] * m.values[r];
        if (r + 1 < mi) acc += sys.sup[r] * m.values[r + 2];
        G[r] = acc - sys.rhs[r];
    }
    return G;
}

// Newton on G(m) = 0. Each residual row touches three nodes, so the Jacobian
// is tridiagonal and a three-coloring of the nodes yields it in three extra
// residual evaluations. Iterates stay clamped in [J, N]; the input profile is
// modified only on success.
bool newton_polish(Profile& m, double j, const ProblemConfig& config,
                   const DopingProfile& doping, const SubsonicParams& params, double box_N,
                   int max_steps, int* steps_taken) {
    const std::size_t mi = m.grid->node_count() - 2;
    Profile iterate = m;
    std::vector<double> G;
    try {
        G = picard_residual(iterate, j, config, doping, params);
    } catch (const IterateOutOfBandError&) {
        return false;
    }
    for (int step = 0; step < max_steps; ++step) {
        TridiagonalSystem jac;
        jac.sub.assign(mi, 0.0);
        jac.diag.assign(mi, 0.0);
        jac.sup.assign(mi, 0.0);
        jac.rhs.assign(mi, 0.0);
        for (int color = 0; color < 3; ++color) {
            Profile pert = iterate;
            std::vector<double> delta(mi, 0.0);
            for (std::size_t c = static_cast<std::size_t>(color); c < mi; c += 3) {
                const double d = 1e-7 * (1.0 + std::abs(iterate.values[c + 1]));
                delta[c] = d;
                pert.values[c + 1] += d;
            }
            const std::vector<double> Gp = picard_residual(pert, j, config, doping, params);
            for (std::size_t r = 0; r < mi; ++r) {
                const double dG = Gp[r] - G[r];
                // Exactly one of columns r-1, r, r+1 is perturbed per color.
                if (r > 0 && delta[r - 1] != 0.0)
                    jac.sub[r] = dG / delta[r - 1];
                else if (delta[r] != 0.0)
                    jac.diag[r] = dG / delta[r];
                else if (r + 1 < mi && delta[r + 1] != 0.0)
                    jac.sup[r] = dG / delta[r + 1];
            }
        }
        for (std::size_t r = 0; r < mi; ++r) jac.rhs[r] = -G[r];
        std::vector<double> dm;
        try {
            dm = thomas_solve(jac).x;
        } catch (const SingularSystemError&) {
            return false;
        }
        double step_norm = 0.0;
        for (std::size_t r = 0; r < mi; ++r) {
            iterate.values[r + 1] += dm[r];
            if (params.clamp)
                iterate.values[r + 1] = std::clamp(iterate.values[r + 1], config.J, box_N);
            step_norm = std::max(step_norm, std::abs(dm[r]));
        }
        if (steps_taken) *steps_taken = step + 1;
        if (!std::isfinite(step_norm)) return false;
        try {
            G = picard_residual(iterate, j, config, doping, params);
        } catch (const IterateOutOfBandError&) {
            return false;
        }
        if (step_norm < params.picard_tol) {
            m = std::move(iterate);
            return true;
        }
    }
    return false;
}

}  // namespace

Profile linearized_step(const Profile& m_bar, double j, const ProblemConfig& config,
                        const DopingProfile& doping, const SubsonicParams& params,
                        double box_N, long* clamp_count, double* clamp_max) {
    if (!(j > 0.0 && j < config.J))
        throw DomainError("linearized_step: need 0 < j < J");

    Profile m_next = solve_bvp(build_linearized_bvp(m_bar, j, config, doping, params));
    if (params.clamp) {
        long count = 0;
        double worst = 0.0;
        for (double& v : m_next.values) {
            if (v < config.J) {
                worst = std::max(worst, config.J - v);
                v = config.J;
                ++count;
            } else if (v > box_N) {
                worst = std::max(worst, v - box_N);
                v = box_N;
                ++count;
            }
        }
        if (count > 0)
            log::debug("linearized_step: clamped ", count, " nodes, max excess ", worst);
        if (clamp_count) *clamp_count += count;
        if (clamp_max) *clamp_max = std::max(*clamp_max, worst);
    }
    return m_next;
}

RegularizedResult solve_regularized(double j, const ProblemConfig& config,
                                    const DopingProfile& doping, const GridPtr& grid,
                                    const Profile& init, const SubsonicParams& params) {
    if (init.grid != grid && init.grid->nodes != grid->nodes)
        throw DomainError("solve_regularized: init profile not on the requested grid");
    const double N = upper_bound_N(config, doping);
    RegularizedResult out;
    out.m = init;
    std::vector<double> history;

    // Frozen-coefficient Picard. Its contraction rate degrades toward 1 as
    // j -> J, so once the iteration is close (or visibly stalled) a
    // tridiagonal Newton polish finishes the solve.
    const double newton_trigger = params.picard_tol * 1e3;
    const int stall_window = std::min(params.picard_max_iter, 60);
    int next_newton_attempt = stall_window;
    for (int it = 0; it < params.picard_max_iter; ++it) {
        Profile next = linearized_step(out.m, j, config, doping, params, N,
                                       &out.clamp_count, &out.clamp_max);
        const double diff = sup_diff(next, out.m);
        history.push_back(diff);
        out.m = std::move(next);
        out.iterations = it + 1;
        if (diff < params.picard_tol) return out;
        if (diff < newton_trigger || it + 1 >= next_newton_attempt) {
            int newton_steps = 0;
            const bool done =
                newton_polish(out.m, j, config, doping, params, N, 40, &newton_steps);
            out.iterations += newton_steps;
            if (done) {
                log::debug("solve_regularized: Newton polish converged in ", newton_steps,
                           " steps at j = ", j);
                return out;
            }
            next_newton_attempt = it + 1 + 20;
        }
    }
    throw DivergenceError("solve_regularized: no convergence in " +
                              std::to_string(params.picard_max_iter) +
                              " Picard iterations at j = " + std::to_string(j) +
                              ", last sup-change " + std::to_string(history.back()),
                          history);
}

Solution continuation_solve(const ProblemConfig& config, const DopingProfile& doping,
                            const GridPtr& grid, const SubsonicParams& params,
                            const std::optional<Profile>& init) {
    const HypothesisReport rep = check_subsonic_hypotheses(config, doping);
    if (!rep.satisfied())
        throw HypothesisError("continuation_solve: subsonic hypotheses unsatisfied", rep);

    Solution sol;
    sol.regime = Regime::Subsonic;
    Profile current = init ? *init : make_profile(grid, config.J);
    int increase_streak = 0;

    for (std::size_t t = 0; t < params.sigma_schedule.size(); ++t) {
        const double sigma = params.sigma_schedule[t];
        if (!(sigma > 0.0 && sigma < 1.0))
            throw DomainError("continuation_solve: sigma outside (0, 1)");
        const double j = config.J * std::sqrt(1.0 - sigma);
        RegularizedResult stage = solve_regularized(j, config, doping, grid, current, params);
        sol.diagnostics.iterations_per_stage.push_back(stage.iterations);
        sol.diagnostics.stage_reg_params.push_back(j);
        sol.diagnostics.bound_violation_count += stage.clamp_count;
        sol.diagnostics.bound_violation_max =
            std::max(sol.diagnostics.bound_violation_max, stage.clamp_max);
        sol.reg_param = j;

        if (t > 0) {
            const double diff = sup_diff(stage.m, current);
            if (!sol.diagnostics.stage_diffs.empty() &&
                diff > sol.diagnostics.stage_diffs.back())
                ++increase_streak;
            else
                increase_streak = 0;
            sol.diagnostics.stage_diffs.push_back(diff);
            log::info("subsonic stage ", t, ": j = ", j, ", diff = ", diff, ", iters = ",
                      stage.iterations);
            current = std::move(stage.m);
            if (diff < params.continuation_tol) {
                sol.diagnostics.continuation_converged = true;
                break;
            }
            if (increase_streak >= 3)
                throw ContinuationError(
                    "continuation_solve: stage differences increased for 3 stages");
        } else {
            current = std::move(stage.m);
        }
    }

    sol.m = std::move(current);
    const auto [linf, l2] = weak_residual(sol.m, config, doping);
    sol.diagnostics.weak_residual_linf = linf;
    sol.diagnostics.weak_residual_l2 = l2;
    sol.diagnostics.weak_residual_interior_linf =
        weak_residual(sol.m, config, doping, kWeakResidualWindow).first;
    sol.diagnostics.lambda_star = fit_lambda(sol.m, config.J);
    sol.diagnostics.holder_seminorm = holder_seminorm(sol.m);
    return sol;
}

double fit_lambda(const Profile& m, double J) {
    const auto& x = m.grid->nodes;
    const double r0 = x.front(), r1 = x.back();
    double lambda = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const double s = std::sin(std::numbers::pi * (x[i] - r0) / (r1 - r0));
        lambda = std::min(lambda, (m.values[i] - J) / s);
    }
    return lambda;
}

}  // namespace sonic
