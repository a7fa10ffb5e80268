// Acceptance suite: one line per criterion, exit code = number of failures.
//
// Each criterion pins its tolerances in code; nothing is calibrated at run
// time. Criterion 6 grades the weak-form residual on hats supported away
// from the sonic boundary layers (the all-hat sup norm is printed alongside;
// it diverges under refinement at a degenerate boundary for the exact
// solution itself, so it carries no acceptance information).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "sonic/fields.hpp"
#include "sonic/linbvp.hpp"
#include "sonic/model.hpp"
#include "sonic/oracle.hpp"
#include "sonic/subsonic.hpp"
#include "sonic/supersonic.hpp"
#include "sonic/verify.hpp"
#include "test_util.hpp"

using namespace sonic;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void criterion(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s%s%s\n", pass ? "PASS" : "FAIL", id, name.c_str(),
                detail.empty() ? "" : " | ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Canonical {
    sonic::Problem problem;
    const char* tag;
};

std::vector<Canonical> canonical() {
    return {{testutil::canonical_n2(), "n=2"}, {testutil::canonical_n3(), "n=3"}};
}

// ---- criterion 1: hypothesis arithmetic through the CLI ----

std::vector<double> parse_margins(const std::string& text, const std::string& regime_tag) {
    std::vector<double> margins;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.rfind("[" + regime_tag + "]", 0) != 0) continue;
        const auto pos = line.find("margin=");
        if (pos == std::string::npos) continue;
        margins.push_back(std::stod(line.substr(pos + 7)));
    }
    return margins;
}

void criterion_1() {
    const fs::path data(SONIC_TEST_DATA_DIR);
    const fs::path tmp = fs::temp_directory_path() / "sonic_acceptance";
    fs::create_directories(tmp);

    bool pass = true;
    std::string detail;
    struct Case {
        const char* config;
        std::vector<double> subsonic_margins;
        std::vector<double> supersonic_margins;
    };
    const std::vector<Case> cases = {
        {"n2.json", {4.0, 1.2}, {2.0}},
        {"n3.json", {13.0, 1.0 / 7.0}, {2.0}},
    };
    int idx = 0;
    for (const auto& c : cases) {
        const fs::path out = tmp / ("check_" + std::to_string(idx++) + ".txt");
        const std::string cmd = std::string(SONIC_CLI_PATH) + " check " +
                                (data / "configs" / c.config).string() +
                                " --regime subsonic > " + out.string() + " 2>&1";
        const int status = std::system(cmd.c_str());
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
            pass = false;
            detail += std::string(c.config) + ": bad exit; ";
            continue;
        }
        std::ifstream in(out);
        std::stringstream buf;
        buf << in.rdbuf();
        const auto sub = parse_margins(buf.str(), "subsonic");
        const auto sup = parse_margins(buf.str(), "supersonic");
        if (sub.size() != c.subsonic_margins.size() ||
            sup.size() != c.supersonic_margins.size()) {
            pass = false;
            detail += std::string(c.config) + ": margin count; ";
            continue;
        }
        for (std::size_t i = 0; i < sub.size(); ++i)
            if (std::abs(sub[i] - c.subsonic_margins[i]) > 1e-12) pass = false;
        for (std::size_t i = 0; i < sup.size(); ++i)
            if (std::abs(sup[i] - c.supersonic_margins[i]) > 1e-12) pass = false;
        detail += std::string(c.config) + " margins ok; ";
    }
    criterion(1, "hypothesis arithmetic via cmd_check (exact to 1e-12)", pass, detail);
}

// ---- criterion 2: subsonic existence ----

void criterion_2() {
    bool pass = true;
    std::string detail;
    for (const auto& c : canonical()) {
        auto grid = make_grid(RadialGrid::clustered(c.problem.config.r0,
                                                    c.problem.config.r1, 1024));
        const Solution sol =
            continuation_solve(c.problem.config, c.problem.doping, grid, {});
        const double J = c.problem.config.J;
        const double N = upper_bound_N(c.problem.config, c.problem.doping);
        bool ok = sol.m.values.front() == J && sol.m.values.back() == J;
        for (std::size_t i = 1; i + 1 < sol.m.size(); ++i)
            ok = ok && sol.m.values[i] > J;
        for (double v : sol.m.values) ok = ok && v <= N + 1e-9;
        const double lam = sol.diagnostics.lambda_star;
        ok = ok && lam > 0.0;
        pass = pass && ok;
        detail += std::string(c.tag) + " lambda*=" + fmt(lam) + "; ";
    }
    criterion(2, "subsonic existence: boundary J, interior > J, lambda* > 0, m <= N",
              pass, detail);
}

// ---- criterion 3: oracle equivalence ----

void criterion_3() {
    bool pass = true;
    std::string detail;
    for (const auto& c : canonical()) {
        for (const Regime regime : {Regime::Subsonic, Regime::Supersonic}) {
            const double p =
                regime == Regime::Subsonic ? 0.9 * c.problem.config.J : 1.1 * c.problem.config.J;
            double prev = 0.0;
            double worst_ratio = 1e300;
            bool ok = true;
            for (std::size_t N : {256, 512, 1024}) {
                auto grid = make_grid(
                    RadialGrid::uniform(c.problem.config.r0, c.problem.config.r1, N));
                Profile solved;
                if (regime == Regime::Subsonic)
                    solved = solve_regularized(p, c.problem.config, c.problem.doping, grid,
                                               make_profile(grid, c.problem.config.J), {})
                                 .m;
                else
                    solved = solve_regularized_supersonic(p, c.problem.config,
                                                          c.problem.doping, grid, {})
                                 .m;
                const auto sh = shoot(regime, p, c.problem.config, c.problem.doping, grid);
                const double d = sup_diff(solved, sh.profile);
                const double h =
                    (c.problem.config.r1 - c.problem.config.r0) / static_cast<double>(N);
                ok = ok && d <= 10.0 * h * h;
                if (prev > 0.0) worst_ratio = std::min(worst_ratio, prev / d);
                prev = d;
            }
            ok = ok && worst_ratio >= 3.5;
            pass = pass && ok;
            detail += std::string(c.tag) + "/" + regime_name(regime) +
                      " ratio=" + fmt(worst_ratio) + "; ";
        }
    }
    criterion(3, "oracle equivalence at 0.9J and 1.1J within 10h^2, shrink >= 3.5x", pass,
              detail);
}

// ---- criterion 4: supersonic existence ----

void criterion_4() {
    bool pass = true;
    std::string detail;
    for (const auto& c : canonical()) {
        auto grid = make_grid(RadialGrid::clustered(c.problem.config.r0,
                                                    c.problem.config.r1, 1024));
        const Solution sol =
            continuation_solve_supersonic(c.problem.config, c.problem.doping, grid, {});
        const double J = c.problem.config.J;
        bool ok = sol.m.values.front() == J && sol.m.values.back() == J;
        for (std::size_t i = 1; i + 1 < sol.m.size(); ++i)
            ok = ok && sol.m.values[i] > 0.0 && sol.m.values[i] < J;
        ok = ok && sol.diagnostics.ell > 0.0;
        const double gap = interior_gap(sol.m, J, (c.problem.config.r1 -
                                                   c.problem.config.r0) /
                                                      10.0);
        ok = ok && gap > 0.0;
        pass = pass && ok;
        detail += std::string(c.tag) + " ell=" + fmt(sol.diagnostics.ell) +
                  " gap=" + fmt(gap) + "; ";
    }
    criterion(4, "supersonic existence: 0 < m < J interior, floor > 0, gap(delta) > 0",
              pass, detail);
}

// ---- criterion 5: uniqueness consistency ----

void criterion_5() {
    bool pass = true;
    std::string detail;
    for (const auto& c : canonical()) {
        auto grid = make_grid(RadialGrid::clustered(c.problem.config.r0,
                                                    c.problem.config.r1, 1024));
        const double N = upper_bound_N(c.problem.config, c.problem.doping);
        const Solution a = continuation_solve(c.problem.config, c.problem.doping, grid, {},
                                              make_profile(grid, c.problem.config.J));
        const Solution b = continuation_solve(c.problem.config, c.problem.doping, grid, {},
                                              make_profile(grid, N));
        const double d = sup_diff(a.m, b.m);
        pass = pass && d < 1e-7;
        detail += std::string(c.tag) + " diff=" + fmt(d) + "; ";
    }
    criterion(5, "uniqueness: continuations from m=J and m=N agree within 1e-7", pass,
              detail);
}

// ---- criterion 6: weak-form residual ----

void criterion_6() {
    bool pass = true;
    std::string detail;
    double all_hat_note = 0.0;
    for (const auto& c : canonical()) {
        for (const Regime regime : {Regime::Subsonic, Regime::Supersonic}) {
            double prev = 0.0, at_1024 = 0.0;
            for (std::size_t N : {512, 1024}) {
                auto grid = make_grid(RadialGrid::clustered(c.problem.config.r0,
                                                            c.problem.config.r1, N));
                const Solution sol =
                    regime == Regime::Subsonic
                        ? continuation_solve(c.problem.config, c.problem.doping, grid, {})
                        : continuation_solve_supersonic(c.problem.config, c.problem.doping,
                                                        grid, {});
                const double windowed =
                    weak_residual(sol.m, c.problem.config, c.problem.doping,
                                  kWeakResidualWindow)
                        .first;
                if (N == 1024) {
                    at_1024 = windowed;
                    all_hat_note = std::max(
                        all_hat_note,
                        weak_residual(sol.m, c.problem.config, c.problem.doping).first);
                }
                if (prev > 0.0) pass = pass && (prev / windowed >= 2.0);
                prev = windowed;
            }
            pass = pass && at_1024 < 1e-4;
            detail += std::string(c.tag) + "/" + regime_name(regime) + "=" +
                      fmt(at_1024) + "; ";
        }
    }
    {
        // Synthetic non-solution must miss by >= 3 orders of magnitude.
        const auto p = testutil::canonical_n2();
        auto grid = make_grid(RadialGrid::clustered(1.0, 2.0, 1024));
        Profile synth = make_profile(grid, p.config.J);
        for (std::size_t i = 0; i < grid->node_count(); ++i)
            synth.values[i] =
                p.config.J + std::sin(std::numbers::pi * (grid->nodes[i] - 1.0));
        synth.values.front() = p.config.J;
        synth.values.back() = p.config.J;
        const double bad =
            weak_residual(synth, p.config, p.doping, kWeakResidualWindow).first;
        pass = pass && bad >= 1e3 * 1e-4;
        detail += "synthetic=" + fmt(bad) + "; ";
    }
    detail += "(all-hat sup=" + fmt(all_hat_note) +
              ", divergent at the sonic layers by construction)";
    criterion(6, "weak-form residual < 1e-4 at N=1024, >= 2x decay, synthetic >= 3 orders",
              pass, detail);
}

// ---- criterion 7: energy identity ----

void criterion_7() {
    bool pass = true;
    std::string detail;
    for (const auto& c : canonical()) {
        auto grid = make_grid(RadialGrid::clustered(c.problem.config.r0,
                                                    c.problem.config.r1, 1024));
        const double j = 0.9 * c.problem.config.J;
        const auto reg = solve_regularized(j, c.problem.config, c.problem.doping, grid,
                                           make_profile(grid, c.problem.config.J), {});
        const double res =
            energy_identity_residual(reg.m, j, c.problem.config, c.problem.doping);
        pass = pass && res < 1e-3;
        detail += std::string(c.tag) + " residual=" + fmt(res) + "; ";
    }
    criterion(7, "energy identity residual < 1e-3 at j = 0.9J, N=1024", pass, detail);
}

// ---- criterion 8: comparison-principle conformance ----

void criterion_8() {
    const auto p = testutil::canonical_n2();
    auto grid = make_grid(RadialGrid::clustered(1.0, 2.0, 512));

    const auto A = solve_regularized_supersonic(1.2, p.config, p.doping, grid, {});
    const auto B = solve_regularized_supersonic(1.5, p.config, p.doping, grid, {});
    const bool super_ok = check_pointwise_domination(B.v, A.v).dominated;

    const Solution sub = continuation_solve(p.config, p.doping, grid, {});
    const double lam = fit_lambda(sub.m, p.config.J);
    Profile sine = make_profile(grid, p.config.J);
    for (std::size_t i = 0; i < grid->node_count(); ++i)
        sine.values[i] =
            p.config.J + lam * std::sin(std::numbers::pi * (grid->nodes[i] - 1.0));
    const bool sub_ok = check_pointwise_domination(sub.m, sine).dominated;

    criterion(8, "comparison principles: v(1.5) >= v(1.2); m >= J + lambda* sin",
              super_ok && sub_ok,
              std::string("supersonic=") + (super_ok ? "ok" : "violated") +
                  ", subsonic=" + (sub_ok ? "ok" : "violated"));
}

// ---- criterion 9: Holder regularity ----

void criterion_9() {
    bool pass = true;
    std::string detail;
    for (const auto& c : canonical()) {
        double h512 = 0.0, h1024 = 0.0, q512 = 0.0, q1024 = 0.0;
        for (std::size_t N : {512, 1024}) {
            auto grid = make_grid(RadialGrid::clustered(c.problem.config.r0,
                                                        c.problem.config.r1, N));
            const Solution sol =
                continuation_solve(c.problem.config, c.problem.doping, grid, {});
            const double hs = holder_seminorm(sol.m);
            const auto& x = grid->nodes;
            const auto& m = sol.m.values;
            const double q = std::max(std::abs(m[1] - m[0]) / (x[1] - x[0]),
                                      std::abs(m[N] - m[N - 1]) / (x[N] - x[N - 1]));
            if (N == 512) {
                h512 = hs;
                q512 = q;
            } else {
                h1024 = hs;
                q1024 = q;
            }
        }
        const bool holder_stable = h1024 / h512 < 2.0 && h512 / h1024 < 2.0;
        const bool quotient_grows = q1024 / q512 >= 1.3;
        pass = pass && holder_stable && quotient_grows;
        detail += std::string(c.tag) + " holder " + fmt(h512) + "->" + fmt(h1024) +
                  ", dq ratio=" + fmt(q1024 / q512) + "; ";
    }
    criterion(9, "C^{1/2}: seminorm stable (<2x), boundary C^1 quotient grows >= 1.3x",
              pass, detail);
}

// ---- criterion 10: kernel correctness ----

void criterion_10() {
    testutil::Rng rng(20240811);
    bool pass = true;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t cells = 32 + rng.next_u64() % 97;
        auto grid = make_grid(RadialGrid::uniform(0.0, 1.0, cells));
        LinearBVP bvp;
        bvp.grid = grid;
        const std::size_t nn = grid->node_count();
        bvp.a.resize(nn);
        bvp.b.resize(nn);
        bvp.c.resize(nn);
        bvp.f.resize(nn);
        bvp.alpha = rng.uniform(-1, 1);
        bvp.beta = rng.uniform(-1, 1);
        for (std::size_t i = 0; i < nn; ++i) {
            bvp.a[i] = rng.uniform(0.5, 2.0);
            bvp.b[i] = rng.uniform(-1.0, 1.0);
            bvp.c[i] = -rng.uniform(0.0, 1.0);
            bvp.f[i] = rng.uniform(-2.0, 2.0);
        }
        const double d = sup_diff(solve_bvp(bvp), dense_reference_solve(bvp));
        worst = std::max(worst, d);
        pass = pass && d <= 1e-12;
    }

    // Manufactured solution y = sin(pi r): observed order >= 1.9.
    double prev_err = 0.0, min_order = 1e300;
    for (std::size_t cells : {128, 256, 512}) {
        auto grid = make_grid(RadialGrid::uniform(0.0, 1.0, cells));
        LinearBVP bvp;
        bvp.grid = grid;
        const std::size_t nn = grid->node_count();
        bvp.a.assign(nn, 1.0);
        bvp.b.assign(nn, 0.0);
        bvp.c.assign(nn, 0.0);
        bvp.f.resize(nn);
        bvp.alpha = 0.0;
        bvp.beta = 0.0;
        for (std::size_t i = 0; i < nn; ++i)
            bvp.f[i] = -std::numbers::pi * std::numbers::pi *
                       std::sin(std::numbers::pi * grid->nodes[i]);
        const Profile y = solve_bvp(bvp);
        double err = 0.0;
        for (std::size_t i = 0; i < nn; ++i)
            err = std::max(err, std::abs(y.values[i] -
                                         std::sin(std::numbers::pi * grid->nodes[i])));
        if (prev_err > 0.0) min_order = std::min(min_order, std::log2(prev_err / err));
        prev_err = err;
    }
    pass = pass && min_order >= 1.9;
    criterion(10, "kernel: thomas vs dense <= 1e-12 on 100 systems; order >= 1.9", pass,
              "worst diff=" + fmt(worst) + ", order=" + fmt(min_order));
}

}  // namespace

int main() {
    std::printf("acceptance suite: canonical configs n=2 (b~=2) and n=3 (b~=3) on [1,2]\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (g_failures == 0)
        std::printf("acceptance: all 10 criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return g_failures;
}
