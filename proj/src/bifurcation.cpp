#include "dfhn/bifurcation.hpp"

#include <algorithm>
#include <cmath>

namespace dfhn {

namespace {

// acos with the spec'd guard: clamp within 1e-12 of [-1,1], reject beyond.
double guarded_acos(double c) {
    if (c > 1.0 + 1e-12 || c < -1.0 - 1e-12)
        throw domain_error("acos argument outside [-1,1]");
    return std::acos(std::clamp(c, -1.0, 1.0));
}

} // namespace

HopfPointFast tau_fast_hopf(double x_star, double J, int k) {
    if (!(J > 0.0)) throw domain_error("tau_fast_hopf: J must be positive");
    if (k < 0) throw domain_error("tau_fast_hopf: k must be >= 0");
    const double x2 = x_star * x_star;
    const double hi = 1.0 + 2.0 * J;
    if (!(x2 > 1.0) || !(x2 < hi))
        throw domain_error("tau_fast_hopf: need 1 < |x*| < sqrt(1+2J)");
    HopfPointFast p;
    p.x_star = x_star;
    p.y = x_star * x_star * x_star / 3.0 - x_star;
    p.zeta = std::sqrt(x2 - 1.0) * std::sqrt(2.0 * J + 1.0 - x2);
    p.tau = (guarded_acos((1.0 - x2 + J) / J) + 2.0 * k * M_PI) / p.zeta;
    p.k = k;
    return p;
}

HopfPointFull tau_full_hopf(double a, double J, double epsilon, int k) {
    if (!(J > 0.0)) throw domain_error("tau_full_hopf: J must be positive");
    if (!(epsilon > 0.0)) throw domain_error("tau_full_hopf: epsilon must be positive");
    if (k < 0) throw domain_error("tau_full_hopf: k must be >= 0");
    const double a2 = a * a;
    const double hi = 1.0 + 2.0 * J;
    if (a2 < 1.0 - 1e-12 || a2 > hi + 1e-12)
        throw domain_error("tau_full_hopf: need 1 <= a <= sqrt(1+2J)");
    HopfPointFull p;
    p.a = a;
    p.A = std::sqrt(std::max((a2 - 1.0) * (hi - a2), 0.0));
    const double S = std::sqrt(p.A * p.A + 4.0 * epsilon);
    p.zeta1 = 0.5 * (-p.A - S);
    p.zeta2 = 0.5 * (-p.A + S);
    const double phi = guarded_acos(1.0 + (1.0 - a2) / J);
    p.tau1 = 2.0 * (phi + 2.0 * k * M_PI) / (p.A + S);
    p.tau2 = 2.0 * (phi - 2.0 * (k + 1) * M_PI) / (p.A - S);
    p.k = k;
    return p;
}

std::string curve_label_name(CurveLabel label) {
    switch (label) {
        case CurveLabel::hopf_fast: return "HopfFast";
        case CurveLabel::hopf_full_1: return "HopfFull1";
        case CurveLabel::hopf_full_2: return "HopfFull2";
        case CurveLabel::saddle_node_plus: return "SaddleNode+";
        case CurveLabel::saddle_node_minus: return "SaddleNode-";
        case CurveLabel::bt_plus: return "BT+";
        case CurveLabel::bt_minus: return "BT-";
        case CurveLabel::homoclinic_approx: return "HomoclinicApprox";
        case CurveLabel::fold_of_cycles: return "FoldOfCycles";
    }
    return "?";
}

std::vector<BifurcationCurve> saddle_node_lines(double tau_lo, double tau_hi, int n) {
    std::vector<BifurcationCurve> out(2);
    out[0].label = CurveLabel::saddle_node_plus;
    out[1].label = CurveLabel::saddle_node_minus;
    for (int i = 0; i < n; ++i) {
        const double t = tau_lo + (tau_hi - tau_lo) * i / (n - 1);
        out[0].samples.push_back({t, t, 2.0 / 3.0});
        out[1].samples.push_back({t, t, -2.0 / 3.0});
    }
    return out;
}

std::pair<BtPoint, BtPoint> bt_points(double J) {
    if (!(J > 0.0)) throw domain_error("bt_points: J must be positive");
    return {BtPoint{1.0 / J, 2.0 / 3.0}, BtPoint{1.0 / J, -2.0 / 3.0}};
}

double bt_homoclinic_approx(double J, double tau) {
    // valid for J tau >= 1; touches the BT point exactly at J tau = 1
    if (!(J * tau >= 1.0 - 1e-12)) throw domain_error("bt_homoclinic_approx: needs J tau >= 1");
    const double nu = J * tau - 1.0;
    return 2.0 / 3.0 - (98.0 / 25.0) * nu * nu / tau;
}

double hopf_tangency_residual(double J, double x_star) {
    const double s = x_star * x_star - 1.0;
    if (!(s > 0.0)) throw domain_error("hopf_tangency_residual: need x*^2 > 1");
    const double tau = tau_fast_hopf(x_star, J, 0).tau;
    return tau - (1.0 / J + s / (3.0 * J * J));
}

namespace {

// Chebyshev nodes on (lo, hi), endpoints excluded by the half-cell offset.
std::vector<double> chebyshev_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        const double t = M_PI * (2.0 * i + 1.0) / (2.0 * n);
        g[i] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(t);
    }
    std::sort(g.begin(), g.end());
    return g;
}

} // namespace

BifurcationCurve sample_fast_hopf(double J, int k, int n) {
    BifurcationCurve c;
    c.label = CurveLabel::hopf_fast;
    c.k = k;
    for (double x : chebyshev_grid(1.0, std::sqrt(1.0 + 2.0 * J), n)) {
        const auto p = tau_fast_hopf(x, J, k);
        c.samples.push_back({x, p.tau, p.y});
    }
    return c;
}

BifurcationCurve sample_full_hopf(double J, double epsilon, int k, bool branch2, int n) {
    BifurcationCurve c;
    c.label = branch2 ? CurveLabel::hopf_full_2 : CurveLabel::hopf_full_1;
    c.k = k;
    const double amax = std::sqrt(1.0 + 2.0 * J);
    // interior Chebyshev nodes plus analytic endpoint values
    const double se = std::sqrt(epsilon);
    c.samples.push_back({1.0, branch2 ? 2.0 * (k + 1) * M_PI / se : 2.0 * k * M_PI / se, 0.0});
    for (double a : chebyshev_grid(1.0 + 1e-9, amax - 1e-9, n - 2)) {
        const auto p = tau_full_hopf(a, J, epsilon, k);
        c.samples.push_back({a, branch2 ? p.tau2 : p.tau1, a * a * a / 3.0 - a});
    }
    c.samples.push_back({amax, (2.0 * k + 1.0) * M_PI / se, amax * amax * amax / 3.0 - amax});
    if (branch2)
        std::sort(c.samples.begin(), c.samples.end(),
                  [](const CurveSample& l, const CurveSample& r) { return l.param < r.param; });
    return c;
}

ContinuityReport full_curve_continuity_check(double J, double epsilon, int k) {
    ContinuityReport rep{};
    rep.k = k;
    const double amax = std::sqrt(1.0 + 2.0 * J);
    const double se = std::sqrt(epsilon);

    // analytic endpoint values
    rep.endpoint_tau1_at_1 = 2.0 * k * M_PI / se;
    rep.endpoint_tau1_at_amax = (2.0 * k + 1.0) * M_PI / se;
    rep.endpoint_tau2_at_1 = 2.0 * (k + 1.0) * M_PI / se;

    // branch matching at the corners, where both formulas are exact
    auto at = [&](double a) { return tau_full_hopf(a, J, epsilon, k); };
    rep.mismatch_outer = std::abs(at(amax).tau1 - at(amax).tau2);
    rep.mismatch_inner = std::abs(at(1.0).tau2 - tau_full_hopf(1.0, J, epsilon, k + 1).tau1);

    // square-root local behavior: (tau(a) - tau_end)/sqrt(|a - a_end|) stabilizes
    double slope = 0.0;
    for (double d : {1e-6, 1e-8}) {
        const auto p = at(amax - d);
        slope = (p.tau1 - rep.endpoint_tau1_at_amax) / std::sqrt(d);
    }
    rep.sqrt_slope_outer = slope;
    for (double d : {1e-6, 1e-8}) {
        const auto p = at(1.0 + d);
        slope = (p.tau2 - rep.endpoint_tau2_at_1) / std::sqrt(d);
    }
    rep.sqrt_slope_inner = slope;
    return rep;
}

} // namespace dfhn
