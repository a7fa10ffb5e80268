#include "sonic/linbvp.hpp"

#include <algorithm>
#include <cmath>

#include "sonic/common.hpp"

namespace sonic {

TridiagonalSystem assemble(const LinearBVP& bvp) {
    const auto& x = bvp.grid->nodes;
    const std::size_t nn = x.size();
    if (bvp.a.size() != nn || bvp.b.size() != nn || bvp.c.size() != nn || bvp.f.size() != nn)
        throw AssemblyError("assemble: coefficient length mismatch");

    for (std::size_t i = 0; i < nn; ++i) {
        if (!(bvp.a[i] > 0.0))
            throw AssemblyError("assemble: ellipticity violation, a <= 0 at node " +
                                std::to_string(i));
        if (bvp.c[i] > 0.0)
            throw AssemblyError("assemble: positive zeroth-order coefficient at node " +
                                std::to_string(i));
    }

    const std::size_t m = nn - 2;  // interior rows
    TridiagonalSystem sys;
    sys.sub.assign(m, 0.0);
    sys.diag.assign(m, 0.0);
    sys.sup.assign(m, 0.0);
    sys.rhs.assign(m, 0.0);

    for (std::size_t i = 1; i + 1 < nn; ++i) {
        const double hm = x[i] - x[i - 1];
        const double hp = x[i + 1] - x[i];
        const double hbar = 0.5 * (hm + hp);
        const double am = 0.5 * (bvp.a[i - 1] + bvp.a[i]);
        const double ap = 0.5 * (bvp.a[i] + bvp.a[i + 1]);
        if (!(am > 0.0) || !(ap > 0.0))
            throw AssemblyError("assemble: ellipticity violation at midpoint of node " +
                                std::to_string(i));

        double lo = am / (hm * hbar);
        double di = -(am / hm + ap / hp) / hbar + bvp.c[i];
        double hi = ap / (hp * hbar);

        const double bi = bvp.b[i];
        if (bvp.advection == LinearBVP::Advection::Central) {
            lo -= bi / (hm + hp);
            hi += bi / (hm + hp);
        } else if (bi >= 0.0) {  // forward difference keeps the matrix monotone
            di -= bi / hp;
            hi += bi / hp;
        } else {
            di += bi / hm;
            lo -= bi / hm;
        }

        const std::size_t row = i - 1;
        sys.diag[row] = di;
        sys.rhs[row] = bvp.f[i];
        if (row == 0)
            sys.rhs[row] -= lo * bvp.alpha;
        else
            sys.sub[row] = lo;
        if (row == m - 1)
            sys.rhs[row] -= hi * bvp.beta;
        else
            sys.sup[row] = hi;
    }
    return sys;
}

TriSolveResult thomas_solve(const TridiagonalSystem& sys) {
    const std::size_t m = sys.size();
    if (sys.sub.size() != m || sys.sup.size() != m || sys.rhs.size() != m)
        throw SingularSystemError("thomas_solve: inconsistent array lengths");

    std::vector<double> cp(m), dp(m);
    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        scale = std::max({scale, std::abs(sys.diag[i]), std::abs(sys.sub[i]),
                          std::abs(sys.sup[i])});
    const double tiny = 1e-300 + 1e-16 * scale * 1e-4;

    double piv = sys.diag[0];
    if (std::abs(piv) <= tiny)
        throw SingularSystemError("thomas_solve: zero pivot at row 0");
    cp[0] = sys.sup[0] / piv;
    dp[0] = sys.rhs[0] / piv;
    for (std::size_t i = 1; i < m; ++i) {
        piv = sys.diag[i] - sys.sub[i] * cp[i - 1];
        if (std::abs(piv) <= tiny)
            throw SingularSystemError("thomas_solve: zero pivot at row " + std::to_string(i));
        cp[i] = sys.sup[i] / piv;
        dp[i] = (sys.rhs[i] - sys.sub[i] * dp[i - 1]) / piv;
    }

    TriSolveResult out;
    out.x.assign(m, 0.0);
    out.x[m - 1] = dp[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) out.x[i] = dp[i] - cp[i] * out.x[i + 1];

    double rmax = 0.0, bmax = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double ax = sys.diag[i] * out.x[i];
        if (i > 0) ax += sys.sub[i] * out.x[i - 1];
        if (i + 1 < m) ax += sys.sup[i] * out.x[i + 1];
        rmax = std::max(rmax, std::abs(ax - sys.rhs[i]));
        bmax = std::max(bmax, std::abs(sys.rhs[i]));
    }
    out.residual = bmax > 0.0 ? rmax / bmax : rmax;
    return out;
}

Profile solve_bvp(const LinearBVP& bvp) {
    const TridiagonalSystem sys = assemble(bvp);
    const TriSolveResult sol = thomas_solve(sys);
    Profile p = make_profile(bvp.grid);
    p.values.front() = bvp.alpha;
    p.values.back() = bvp.beta;
    std::copy(sol.x.begin(), sol.x.end(), p.values.begin() + 1);
    return p;
}

}  // namespace sonic
