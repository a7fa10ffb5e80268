#include "sonic/model.hpp"

#include <algorithm>
#include <cmath>

#include "sonic/numerics.hpp"

namespace sonic {

const char* regime_name(Regime r) {
    return r == Regime::Subsonic ? "subsonic" : "supersonic";
}

ProblemConfig::ProblemConfig(int n_, double r0_, double r1_, double tau_, double j0_)
    : n(n_), r0(r0_), r1(r1_), tau(tau_), j0(j0_) {
    if (n != 2 && n != 3) throw DomainError("ProblemConfig: n must be 2 or 3");
    if (!(r0 > 0.0)) throw DomainError("ProblemConfig: r0 must be positive");
    if (!(r1 > r0)) throw DomainError("ProblemConfig: r1 must exceed r0");
    if (!(tau > 0.0)) throw DomainError("ProblemConfig: tau must be positive");
    if (!(j0 > 0.0)) throw DomainError("ProblemConfig: j0 must be positive");
    J = j0 * radial_weight(r0, n);
}

DopingProfile DopingProfile::constant(double value) {
    DopingProfile d;
    d.kind = Kind::Constant;
    d.coeffs = {value};
    return d;
}

DopingProfile DopingProfile::polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) throw DomainError("DopingProfile: empty coefficient list");
    DopingProfile d;
    d.kind = Kind::Polynomial;
    d.coeffs = std::move(coeffs);
    return d;
}

DopingProfile DopingProfile::piecewise_linear(std::vector<std::pair<double, double>> knots) {
    if (knots.size() < 2) throw DomainError("DopingProfile: need at least two knots");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i)
        if (!(knots[i].first < knots[i + 1].first))
            throw DomainError("DopingProfile: knot radii not strictly increasing");
    DopingProfile d;
    d.kind = Kind::PiecewiseLinear;
    d.knots = std::move(knots);
    return d;
}

double DopingProfile::operator()(double r) const {
    switch (kind) {
        case Kind::Constant:
            return coeffs[0];
        case Kind::Polynomial: {
            double v = 0.0;
            for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * r + *it;
            return v;
        }
        case Kind::PiecewiseLinear: {
            if (r <= knots.front().first) return knots.front().second;
            if (r >= knots.back().first) return knots.back().second;
            auto hi = std::upper_bound(knots.begin(), knots.end(), r,
                                       [](double x, const auto& k) { return x < k.first; });
            auto lo = hi - 1;
            const double t = (r - lo->first) / (hi->first - lo->first);
            return lo->second + t * (hi->second - lo->second);
        }
    }
    return 0.0;
}

DopingProfile DopingProfile::scaled(double factor) const {
    if (!(factor > 0.0)) throw DomainError("DopingProfile: scale factor must be positive");
    DopingProfile d = *this;
    for (double& c : d.coeffs) c *= factor;
    for (auto& k : d.knots) k.second *= factor;
    return d;
}

void DopingProfile::validate(double r0, double r1) const {
    if (kind == Kind::PiecewiseLinear) {
        if (knots.front().first > r0 || knots.back().first < r1)
            throw DomainError("DopingProfile: knots must span [r0, r1]");
    }
    // Positivity by dense sampling; all supported kinds are continuous.
    const int samples = 10000;
    for (int i = 0; i <= samples; ++i) {
        const double r = r0 + (r1 - r0) * static_cast<double>(i) / samples;
        if (!((*this)(r) > 0.0))
            throw DomainError("DopingProfile: b~(r) not positive near r = " + std::to_string(r));
    }
}

double derive_flux_constant(const ProblemConfig& config) {
    return config.j0 * radial_weight(config.r0, config.n);
}

double eval_B(const DopingProfile& doping, const ProblemConfig& config, double r) {
    if (r < config.r0 || r > config.r1)
        throw DomainError("eval_B: r = " + std::to_string(r) + " outside [r0, r1]");
    return radial_weight(r, config.n) * doping(r);
}

SonicDensities sonic_boundary_densities(const ProblemConfig& config) {
    SonicDensities d;
    d.rho0 = config.j0;
    d.rho1 = config.j0 * radial_weight(config.r0, config.n) / radial_weight(config.r1, config.n);
    return d;
}

namespace {

// Golden-section refinement of a continuous extremum bracketed by [lo, hi].
template <typename F>
double refine_extremum(F&& f, double lo, double hi, bool maximize) {
    constexpr double invphi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
        const bool keep_left = maximize ? (fc > fd) : (fc < fd);
        if (keep_left) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    const double mid = 0.5 * (a + b);
    return maximize ? std::max({f(mid), fc, fd}) : std::min({f(mid), fc, fd});
}

template <typename F>
std::pair<double, double> scan_extrema(F&& f, const DopingProfile& doping, double r0,
                                       double r1, int samples) {
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(samples) + 8);
    for (int i = 0; i <= samples; ++i)
        pts.push_back(r0 + (r1 - r0) * static_cast<double>(i) / samples);
    if (doping.kind == DopingProfile::Kind::PiecewiseLinear)
        for (const auto& k : doping.knots)
            if (k.first > r0 && k.first < r1) pts.push_back(k.first);
    std::sort(pts.begin(), pts.end());

    std::size_t imin = 0, imax = 0;
    double vmin = f(pts[0]), vmax = vmin;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double v = f(pts[i]);
        if (v < vmin) { vmin = v; imin = i; }
        if (v > vmax) { vmax = v; imax = i; }
    }
    // Refine interior extrema between the neighbors of the best sample.
    if (imin > 0 && imin + 1 < pts.size())
        vmin = std::min(vmin, refine_extremum(f, pts[imin - 1], pts[imin + 1], false));
    if (imax > 0 && imax + 1 < pts.size())
        vmax = std::max(vmax, refine_extremum(f, pts[imax - 1], pts[imax + 1], true));
    return {vmin, vmax};
}

}  // namespace

BandExtrema band_extrema(const DopingProfile& doping, const ProblemConfig& config,
                         int samples) {
    if (samples < 1000) throw DomainError("band_extrema: need at least 1000 samples");
    const auto B = [&](double r) { return radial_weight(r, config.n) * doping(r); };
    const auto calB = [&](double r) { return B(r) + 2.0 * r / config.tau - 2.0; };

    BandExtrema e{};
    std::tie(e.B_inf, e.B_sup) = scan_extrema(B, doping, config.r0, config.r1, samples);
    std::tie(e.calB_inf, e.calB_sup) =
        scan_extrema(calB, doping, config.r0, config.r1, samples);
    return e;
}

bool HypothesisReport::satisfied() const {
    for (const auto& c : conditions)
        if (!c.satisfied) return false;
    return true;
}

namespace {

HypothesisCondition make_condition(std::string name, double lhs, double rhs) {
    HypothesisCondition c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.margin = lhs - rhs;
    c.satisfied = c.margin > 0.0;
    return c;
}

}  // namespace

HypothesisReport check_subsonic_hypotheses(const ProblemConfig& config,
                                           const DopingProfile& doping) {
    doping.validate(config.r0, config.r1);
    const BandExtrema e = band_extrema(doping, config);
    HypothesisReport rep;
    rep.regime = Regime::Subsonic;
    rep.n = config.n;
    rep.B_inf = e.B_inf;
    rep.B_sup = e.B_sup;
    const double J = config.J;
    if (config.n == 2) {
        rep.conditions.push_back(
            make_condition("Bsup + 1/tau > J", e.B_sup + 1.0 / config.tau, J));
        rep.conditions.push_back(make_condition(
            "Binf + J/(tau (Bsup + 1/tau)) > J",
            e.B_inf + J / (config.tau * (e.B_sup + 1.0 / config.tau)), J));
    } else {
        rep.calB_inf = e.calB_inf;
        rep.calB_sup = e.calB_sup;
        rep.conditions.push_back(make_condition("calBsup > J", e.calB_sup, J));
        // min_r (B + 2 r J / (tau calBsup) - 2): dense scan with refinement.
        const auto g = [&](double r) {
            return radial_weight(r, config.n) * doping(r) +
                   2.0 * r * J / (config.tau * e.calB_sup) - 2.0;
        };
        const auto [gmin, gmax] = scan_extrema(g, doping, config.r0, config.r1, 10000);
        (void)gmax;
        rep.conditions.push_back(
            make_condition("min(B + 2rJ/(tau calBsup) - 2) > J", gmin, J));
    }
    return rep;
}

HypothesisReport check_supersonic_hypotheses(const ProblemConfig& config,
                                             const DopingProfile& doping) {
    doping.validate(config.r0, config.r1);
    const BandExtrema e = band_extrema(doping, config);
    HypothesisReport rep;
    rep.regime = Regime::Supersonic;
    rep.n = config.n;
    rep.B_inf = e.B_inf;
    rep.B_sup = e.B_sup;
    if (config.n == 2) {
        rep.conditions.push_back(
            make_condition("Binf + 1/tau > J", e.B_inf + 1.0 / config.tau, config.J));
    } else {
        rep.calB_inf = e.calB_inf;
        rep.calB_sup = e.calB_sup;
        rep.conditions.push_back(make_condition("calBinf > J", e.calB_inf, config.J));
    }
    return rep;
}

}  // namespace sonic
