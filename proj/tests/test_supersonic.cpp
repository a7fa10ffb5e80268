#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "sonic/oracle.hpp"
#include "sonic/supersonic.hpp"
#include "sonic/verify.hpp"
#include "test_util.hpp"

using namespace sonic;

TEST_CASE("to_v / from_v") {
    auto grid = make_grid(RadialGrid::uniform(1.0, 2.0, 32));
    {
        const Profile m = make_profile(grid, 1.5);
        const Profile v = to_v(m, 1.5);
        for (double x : v.values) CHECK(x == doctest::Approx(1.0));
    }
    {
        // m = J with k = k0 J maps to v = k0.
        const double J = 1.0, k0 = 1.25;
        const Profile m = make_profile(grid, J);
        const Profile v = to_v(m, k0 * J);
        for (double x : v.values) CHECK(x == doctest::Approx(k0).epsilon(1e-15));
    }
    {
        testutil::Rng rng(3);
        Profile m = make_profile(grid, 1.0);
        for (double& x : m.values) x = rng.uniform(0.2, 3.0);
        const Profile rt = from_v(to_v(m, 1.7), 1.7);
        CHECK(sup_diff(rt, m) < 1e-14);
    }
    {
        Profile m = make_profile(grid, 1.0);
        m.values[5] = 0.0;
        CHECK_THROWS_AS(to_v(m, 1.5), DomainError);
    }
}

TEST_CASE("inner_step: dense-oracle agreement and n=2 source reduction") {
    const auto p = testutil::canonical_n2();
    auto grid = make_grid(RadialGrid::uniform(1.0, 2.0, 128));
    const double k = 1.5, k0 = 1.5;
    const Profile eta = make_profile(grid, 1.5);
    const Profile xi = make_profile(grid, 1.5);

    const Profile zeta = inner_step(xi, eta, k, p.config, p.doping, {});

    LinearBVP bvp;
    bvp.grid = grid;
    const std::size_t nn = grid->node_count();
    bvp.a.resize(nn);
    bvp.b.resize(nn);
    bvp.c.assign(nn, 0.0);
    bvp.f.resize(nn);
    bvp.alpha = k0;
    bvp.beta = k0;
    for (std::size_t i = 0; i < nn; ++i) {
        const double r = grid->nodes[i];
        const double ev = eta.values[i], xv = xi.values[i];
        bvp.a[i] = r * (ev + 1.0) * (xv - 1.0) / ev;
        bvp.b[i] = r / p.config.tau;
        // n=2 hand form: G = B + eta/tau - k/eta.
        bvp.f[i] = -(eval_B(p.doping, p.config, r) + ev / p.config.tau - k / ev);
    }
    const Profile dense = dense_reference_solve(bvp);
    CHECK(sup_diff(zeta, dense) < 1e-10);
}

TEST_CASE("inner_step: iterate at or below sonic is rejected") {
    const auto p = testutil::canonical_n2();
    auto grid = make_grid(RadialGrid::uniform(1.0, 2.0, 32));
    Profile eta = make_profile(grid, 1.5);
    Profile xi = make_profile(grid, 1.5);
    xi.values[7] = 1.0;
    CHECK_THROWS_AS(inner_step(xi, eta, 1.5, p.config, p.doping, {}),
                    IterateBelowSonicError);
}

TEST_CASE("outer_step: fixed point, boundary exactness, floor") {
    const auto p = testutil::canonical_n2();
    auto grid = make_grid(RadialGrid::clustered(1.0, 2.0, 256));
    SupersonicParams params;
    const auto reg = solve_regularized_supersonic(1.5, p.config, p.doping, grid, params);

    // outer_step applied to the converged v reproduces it within outer_tol.
    const Profile again = outer_step(reg.v, 1.5, p.config, p.doping, params);
    CHECK(sup_diff(again, reg.v) < 10 * params.outer_tol);

    CHECK(reg.v.values.front() == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(reg.v.values.back() == doctest::Approx(1.5).epsilon(1e-15));
    for (double v : reg.v.values) CHECK(v >= 1.5 - params.floor_tol);
}

TEST_CASE("inner fixed point satisfies its own linear system to 1e-8") {
    const auto p = testutil::canonical_n2();
    auto grid = make_grid(RadialGrid::clustered(1.0, 2.0, 256));
    SupersonicParams params;
    const auto reg = solve_regularized_supersonic(1.5, p.config, p.doping, grid, params);

    // Re-assemble the inner linearized system at xi = eta = v and check the
    // algebraic residual of the converged iterate.
    LinearBVP bvp;
    bvp.grid = grid;
    const std::size_t nn = grid->node_count();
    bvp.a.resize(nn);
    bvp.b.resize(nn);
    bvp.c.assign(nn, 0.0);
    bvp.f.resize(nn);
    bvp.alpha = 1.5;
    bvp.beta = 1.5;
    for (std::size_t i = 0; i < nn; ++i) {
        const double r = grid->nodes[i];
        const double ev = reg.v.values[i], xv = reg.v.values[i];
        bvp.a[i] = r * (ev + 1.0) * (xv - 1.0) / ev;
        bvp.b[i] = r / p.config.tau;
        bvp.f[i] = -(eval_B(p.doping, p.config, r) + ev / p.config.tau - 1.5 / ev);
    }
    const TridiagonalSystem sys = assemble(bvp);
    double rmax = 0.0, scale = 0.0;
    for (std::size_t row = 0; row < sys.size(); ++row) {
        double ax = sys.diag[row] * reg.v.values[row + 1];
        if (row > 0) ax += sys.sub[row] * reg.v.values[row];
        if (row + 1 < sys.size()) ax += sys.sup[row] * reg.v.values[row + 2];
        rmax = std::max(rmax, std::abs(ax - sys.rhs[row]));
        scale = std::max(scale, std::abs(sys.rhs[row]));
    }
    CHECK(rmax / scale < 1e-8);
}

TEST_CASE("outer fixed point matches the shooting oracle at the midpoint") {
    const auto p = testutil::canonical_n2();
    auto grid = make_grid(RadialGrid::uniform(1.0, 2.0, 512));
    const auto reg = solve_regularized_supersonic(1.5, p.config, p.doping, grid, {});
    const auto sh = shoot(Regime::Supersonic, 1.5, p.config, p.doping, grid);
    const Profile v_oracle = to_v(sh.profile, 1.5);
    CHECK(std::abs(reg.v.values[256] - v_oracle.values[256]) < 1e-6);
}

TEST_CASE("solve_regularized_supersonic: oracle cross-checks at k = 1.1 J") {
    {
        const auto p = testutil::canonical_n2();
        auto grid = make_grid(RadialGrid::uniform(1.0, 2.0, 512));
        const auto reg = solve_regularized_supersonic(1.1, p.config, p.doping, grid, {});
        const auto sh = shoot(Regime::Supersonic, 1.1, p.config, p.doping, grid);
        CHECK(std::abs(reg.m.values[256] - sh.profile.values[256]) < 1e-6);
        // Boundary data is exactly J = k/k0.
        CHECK(reg.m.values.front() == p.config.J);
        CHECK(reg.m.values.back() == p.config.J);
    }
    {
        const auto p = testutil::canonical_n3();
        auto grid = make_grid(RadialGrid::clustered(1.0, 2.0, 1024));
        const auto reg = solve_regularized_supersonic(1.1, p.config, p.doping, grid, {});
        const auto sh = shoot(Regime::Supersonic, 1.1, p.config, p.doping, grid);
        CHECK(std::abs(reg.m.values[512] - sh.profile.values[512]) < 1e-6);
    }
}

TEST_CASE("oracle equivalence (supersonic): 10 h^2 with >= 3.5x reduction") {
    const auto p = testutil::canonical_n3();
    double prev = 0.0;
    for (std::size_t N : {256, 512, 1024}) {
        auto grid = make_grid(RadialGrid::uniform(1.0, 2.0, N));
        const auto reg = solve_regularized_supersonic(1.1, p.config, p.doping, grid, {});
        const auto sh = shoot(Regime::Supersonic, 1.1, p.config, p.doping, grid);
        const double d = sup_diff(reg.m, sh.profile);
        const double h = 1.0 / static_cast<double>(N);
        CHECK(d <= 10.0 * h * h);
        if (prev > 0.0) CHECK(prev / d >= 3.5);
        prev = d;
    }
}

TEST_CASE("reciprocal bound duality holds on converged stages") {
    const auto p = testutil::canonical_n2();
    auto grid = make_grid(RadialGrid::clustered(1.0, 2.0, 128));
    for (double k0 : {1.5, 1.125, 1.03125}) {
        const double k = p.config.J * k0;
        const auto reg = solve_regularized_supersonic(k, p.config, p.doping, grid, {});
        for (std::size_t i = 0; i < reg.v.size(); ++i) {
            const bool v_ok = reg.v.values[i] >= k0 - 1e-9;
            const bool m_ok = reg.m.values[i] <= p.config.J + 1e-9;
            CHECK(v_ok);
            CHECK(v_ok == m_ok);
        }
    }
}

TEST_CASE("continuation_solve_supersonic: canonical runs") {
    for (const auto& p : {testutil::canonical_n2(), testutil::canonical_n3()}) {
        auto grid = make_grid(RadialGrid::clustered(1.0, 2.0, 512));
        const Solution sol = continuation_solve_supersonic(p.config, p.doping, grid, {});
        CHECK(sol.regime == Regime::Supersonic);
        CHECK(sol.m.values.front() == p.config.J);
        CHECK(sol.m.values.back() == p.config.J);
        for (std::size_t i = 1; i + 1 < sol.m.size(); ++i) {
            CHECK(sol.m.values[i] > 0.0);
            CHECK(sol.m.values[i] < p.config.J);
        }
        CHECK(sol.diagnostics.ell > 0.0);
        CHECK(sol.diagnostics.interior_gap > 0.0);

        // Empirical v ceiling stays bounded along the schedule (growth <= 2x
        // over the first stage's ceiling).
        const auto& vmax = sol.diagnostics.v_max_per_stage;
        REQUIRE(!vmax.empty());
        for (double v : vmax) CHECK(v <= 2.0 * vmax.front());
    }
}

TEST_CASE("continuation_solve_supersonic: hypothesis gate") {
    // b~ small, tau large, J large: Binf + 1/tau < J.
    const ProblemConfig cfg(2, 1.0, 2.0, 10.0, 3.0);
    auto grid = make_grid(RadialGrid::clustered(1.0, 2.0, 64));
    CHECK_THROWS_AS(continuation_solve_supersonic(cfg, DopingProfile::constant(2.0), grid, {}),
                    HypothesisError);
}

TEST_CASE("comparison principle on ordered boundary data (v-problem)") {
    const auto p = testutil::canonical_n2();
    auto grid = make_grid(RadialGrid::clustered(1.0, 2.0, 256));
    const auto A = solve_regularized_supersonic(1.2, p.config, p.doping, grid, {});
    const auto B = solve_regularized_supersonic(1.5, p.config, p.doping, grid, {});
    const auto dom = check_pointwise_domination(B.v, A.v);
    CHECK(dom.dominated);
}

TEST_CASE("k0 schedule defaults") {
    const auto s = SupersonicParams::default_k0_schedule();
    REQUIRE(s.size() == 15);
    CHECK(s.front() == 1.5);
    for (std::size_t i = 1; i < s.size(); ++i)
        CHECK(s[i] - 1.0 == doctest::Approx((s[i - 1] - 1.0) * 0.25));
    for (double k0 : s) CHECK(k0 > 1.0);
}

TEST_CASE("under-relaxation reaches the same fixed point") {
    const auto p = testutil::canonical_n2();
    auto grid = make_grid(RadialGrid::clustered(1.0, 2.0, 128));
    SupersonicParams damped;
    damped.relaxation = 0.5;
    const auto a = solve_regularized_supersonic(1.3, p.config, p.doping, grid, {});
    const auto b = solve_regularized_supersonic(1.3, p.config, p.doping, grid, damped);
    CHECK(sup_diff(a.m, b.m) < 1e-7);
    CHECK(b.outer_iterations >= a.outer_iterations);  // damping slows the loop
}
