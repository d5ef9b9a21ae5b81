#include "dfhn/normal_form.hpp"

#include <cmath>
#include <limits>

#include "dfhn/solver.hpp"
#include "dfhn/spectrum.hpp"

namespace dfhn {

namespace {

using cp = std::complex<double>;

cp dot(const cplx2& u, const cplx2& v) { return u[0] * v[0] + u[1] * v[1]; }

cplx2 mat_vec(const std::array<cplx2, 2>& M, const cplx2& v) {
    return {M[0][0] * v[0] + M[0][1] * v[1], M[1][0] * v[0] + M[1][1] * v[1]};
}

cplx2 solve2(const std::array<cplx2, 2>& M, const cplx2& b) {
    const cp det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
    if (std::abs(det) < 1e-300) throw ill_conditioned("singular 2x2 solve");
    return {(b[0] * M[1][1] - M[0][1] * b[1]) / det, (M[0][0] * b[1] - b[0] * M[1][0]) / det};
}

// composite Simpson of a complex integrand on [-tau, 0] with n panels (n even)
template <class F>
cp simpson(F f, double tau, int n) {
    const double h = tau / n;
    cp s = f(-tau) + f(0.0);
    for (int i = 1; i < n; ++i) s += f(-tau + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * (h / 3.0);
}

struct ReductionInput {
    double tau;
    double omega;
    std::array<cplx2, 2> A0; // instantaneous coefficient
    std::array<cplx2, 2> A1; // delayed coefficient
    cplx2 v;                 // right eigenvector, v_x = 1
    cplx2 w;                 // left eigenvector (row) for +i omega
    double quad_coeff;       // f(u) = quad u^2 + cubic u^3 acting on the x component
    double cubic_coeff;
};

// Hopf coefficient c1(0) of the reduced planar system, plus the workspace.
// Nonlinearity acts on the x component and depends on phi(0) only.
cp reduce(const ReductionInput& in, NormalFormWorkspace& ws, int panels) {
    const double om = in.omega, tau = in.tau;
    const cp iw(0.0, om);

    // Hale bilinear pairing <psi, phi> = w v + int_{-tau}^0 w e^{-i om (s+tau)} A1 v e^{i om s} ds
    auto kern = [&](double s) {
        const cp a = std::exp(cp(0.0, -om * (s + tau)));
        const cp b = std::exp(cp(0.0, om * s));
        return a * b * dot(in.w, mat_vec(in.A1, in.v));
    };
    const cp N = dot(in.w, in.v) + simpson(kern, tau, panels);
    if (std::abs(N) < 1e-10) throw ill_conditioned("degenerate adjoint pairing");
    const cp p1 = in.w[0] / N; // multiplier of the (x-component) nonlinearity

    const double q2 = in.quad_coeff, q3 = in.cubic_coeff;
    const cp g20 = p1 * (2.0 * q2);
    const cp g11 = p1 * (2.0 * q2);
    const cp g02 = p1 * (2.0 * q2);

    // constant parts of the second-order profiles
    const cplx2 F20{2.0 * q2, 0.0}, F11{2.0 * q2, 0.0};
    const cp e2 = std::exp(cp(0.0, -2.0 * om * tau));
    std::array<cplx2, 2> M20{
        cplx2{2.0 * iw - in.A0[0][0] - in.A1[0][0] * e2, -in.A0[0][1] - in.A1[0][1] * e2},
        cplx2{-in.A0[1][0] - in.A1[1][0] * e2, 2.0 * iw - in.A0[1][1] - in.A1[1][1] * e2}};
    std::array<cplx2, 2> M11{
        cplx2{-in.A0[0][0] - in.A1[0][0], -in.A0[0][1] - in.A1[0][1]},
        cplx2{-in.A0[1][0] - in.A1[1][0], -in.A0[1][1] - in.A1[1][1]}};
    const cplx2 E = solve2(M20, F20);
    const cplx2 E2 = solve2(M11, F11);

    auto W20_at = [&](double th) {
        const cp q = std::exp(cp(0.0, om * th));
        const cp qb = std::conj(q);
        cplx2 r;
        for (int i = 0; i < 2; ++i)
            r[i] = (cp(0.0, 1.0) * g20 / om) * in.v[i] * q +
                   (cp(0.0, 1.0) * std::conj(g02) / (3.0 * om)) * std::conj(in.v[i]) * qb +
                   E[i] * std::exp(cp(0.0, 2.0 * om * th));
        return r;
    };
    auto W11_at = [&](double th) {
        const cp q = std::exp(cp(0.0, om * th));
        const cp qb = std::conj(q);
        cplx2 r;
        for (int i = 0; i < 2; ++i)
            r[i] = (cp(0.0, -1.0) * g11 / om) * in.v[i] * q +
                   (cp(0.0, 1.0) * std::conj(g11) / om) * std::conj(in.v[i]) * qb + E2[i];
        return r;
    };

    // f = q2 x^2 + q3 x^3 with x = w + wbar + W: the w^2 wbar coefficient is
    // q2 (2 W11(0) + W20(0)) + 3 q3 in the x component.
    const cplx2 W20_0 = W20_at(0.0), W11_0 = W11_at(0.0);
    const cp g21 = 2.0 * p1 * (q2 * (2.0 * W11_0[0] + W20_0[0]) + 3.0 * q3);

    const cp c1 =
        (cp(0.0, 1.0) / (2.0 * om)) * (g20 * g11 - 2.0 * std::norm(g11) - std::norm(g02) / 3.0) +
        g21 / 2.0;

    // workspace bookkeeping and residual checks
    ws.omega = om;
    ws.tau = tau;
    ws.right_eigvec = in.v;
    ws.left_eigvec = in.w;
    ws.pairing = N;
    ws.g20 = g20;
    ws.g11 = g11;
    ws.g02 = g02;
    ws.g21 = g21;
    ws.E20 = E;
    ws.E11 = E2;
    const int ngrid = 65;
    ws.theta.resize(ngrid);
    ws.h20.resize(ngrid);
    ws.h11.resize(ngrid);
    for (int i = 0; i < ngrid; ++i) {
        ws.theta[i] = -tau + tau * i / (ngrid - 1);
        ws.h20[i] = W20_at(ws.theta[i]);
        ws.h11[i] = W11_at(ws.theta[i]);
    }
    {
        // normalized pairing residual
        const cp Nn = dot(in.w, in.v) / N + simpson(kern, tau, panels) / N;
        ws.pairing_residual = std::abs(Nn - 1.0);
        // theta = 0 boundary conditions:
        //   A0 W20(0) + A1 W20(-tau) + F20 - g20 v - conj(g02) vbar = 2 i w W20(0)
        //   A0 W11(0) + A1 W11(-tau) + F11 - g11 v - conj(g11) vbar = 0
        const cplx2 W20_m = W20_at(-tau), W11_m = W11_at(-tau);
        double r = 0.0;
        for (int i = 0; i < 2; ++i) {
            const cp lhs20 = dot(in.A0[i], W20_0) + dot(in.A1[i], W20_m) + F20[i] -
                             g20 * in.v[i] - std::conj(g02) * std::conj(in.v[i]) -
                             2.0 * iw * W20_0[i];
            const cp lhs11 = dot(in.A0[i], W11_0) + dot(in.A1[i], W11_m) + F11[i] -
                             g11 * in.v[i] - std::conj(g11) * std::conj(in.v[i]);
            r = std::max({r, std::abs(lhs20), std::abs(lhs11)});
        }
        ws.bc_residual = r;
    }
    return c1;
}

} // namespace

LyapunovResult lyap1_full(double J, double epsilon, double a) {
    const auto hp = tau_full_hopf(a, J, epsilon, 0);
    const double tau = hp.tau1;
    const double om = std::abs(hp.zeta1);

    // marginality check: i zeta_1 must be a characteristic root
    const double res = std::abs(char_fn_full(cp(0.0, hp.zeta1), a, J, tau, epsilon));
    if (res > 1e-8 * std::max(1.0, om)) throw not_on_hopf_curve("(a, tau) not marginal");

    ReductionInput in;
    in.tau = tau;
    in.omega = om;
    in.A0 = {cplx2{1.0 - a * a + J, 1.0}, cplx2{-epsilon, 0.0}};
    in.A1 = {cplx2{-J, 0.0}, cplx2{0.0, 0.0}};
    in.v = {1.0, cp(0.0, epsilon / om)};
    in.w = {1.0, cp(0.0, -1.0 / om)};
    in.quad_coeff = -a;
    in.cubic_coeff = -1.0 / 3.0;

    NormalFormWorkspace ws;
    const cp c1 = reduce(in, ws, 1 << 10);
    NormalFormWorkspace ws2;
    const cp c1b = reduce(in, ws2, 1 << 11);
    ws.convergence_delta = std::abs(c1b - c1) / std::max(1e-300, std::abs(c1));
    if (ws.convergence_delta > 1e-6)
        throw ill_conditioned("quadrature for ell1 did not converge");
    ws.nu = J * tau - 1.0;
    ws.a1 = (std::abs(1.0 - J * tau) > 1e-12) ? J * tau * tau / (2.0 * (1.0 - J * tau))
                                              : std::numeric_limits<double>::infinity();

    LyapunovResult r;
    // reported in the singular (x / sqrt(eps)) amplitude scale
    r.ell1 = std::sqrt(epsilon) * c1.real() / 4.0;
    r.sign = r.ell1 < 0.0 ? -1 : 1;
    r.criticality = r.ell1 < 0.0 ? Criticality::supercritical : Criticality::subcritical;
    r.workspace = ws;
    return r;
}

LyapunovResult lyap1_fast_x(double J, double x_star) {
    const auto hp = tau_fast_hopf(x_star, J, 0);
    const double tau = hp.tau, om = hp.zeta;
    const double res = std::abs(char_fn_fast(cp(0.0, om), x_star, J, tau));
    if (res > 1e-8 * std::max(1.0, om)) throw not_on_hopf_curve("(x*, tau) not marginal");

    // scalar problem embedded in the 2x2 machinery with a dummy second row
    ReductionInput in;
    in.tau = tau;
    in.omega = om;
    in.A0 = {cplx2{1.0 - x_star * x_star + J, 0.0}, cplx2{0.0, -1.0}};
    in.A1 = {cplx2{-J, 0.0}, cplx2{0.0, 0.0}};
    in.v = {1.0, 0.0};
    in.w = {1.0, 0.0};
    in.quad_coeff = -x_star;
    in.cubic_coeff = -1.0 / 3.0;

    NormalFormWorkspace ws;
    const cp c1 = reduce(in, ws, 1 << 10);
    NormalFormWorkspace ws2;
    const cp c1b = reduce(in, ws2, 1 << 11);
    ws.convergence_delta = std::abs(c1b - c1) / std::max(1e-300, std::abs(c1));
    if (ws.convergence_delta > 1e-6)
        throw ill_conditioned("quadrature for ell1 did not converge");
    ws.nu = J * tau - 1.0;
    ws.a1 = (std::abs(1.0 - J * tau) > 1e-12) ? J * tau * tau / (2.0 * (1.0 - J * tau))
                                              : std::numeric_limits<double>::infinity();

    LyapunovResult r;
    r.ell1 = c1.real() / 4.0;
    r.sign = r.ell1 < 0.0 ? -1 : 1;
    r.criticality = r.ell1 < 0.0 ? Criticality::supercritical : Criticality::subcritical;
    r.workspace = ws;
    return r;
}

LyapunovResult lyap1_fast(double J, double y, Branch branch) {
    return lyap1_fast_x(J, branch_eval(branch, y));
}

namespace {

// Integrate from fp + (amp0, 0); saturation vs escape of the x deviation.
// Escape before saturation reads subcritical; two consecutive nearly-equal
// envelope blocks below the escape scale read supercritical.
Criticality probe_outcome(const Trajectory& tr, double x_eq, double amp0) {
    const auto& x = tr.x();
    const std::size_t n = x.size();
    const double escape = std::max(1.0, 50.0 * amp0);
    const int nb = 12;
    double prev = -1.0;
    for (int b = 0; b < nb; ++b) {
        const std::size_t lo = n * b / nb, hi = n * (b + 1) / nb;
        double env = 0.0;
        for (std::size_t i = lo; i < hi; ++i) env = std::max(env, std::abs(x[i] - x_eq));
        if (env > escape) return Criticality::subcritical;
        if (b > 0 && env > 2.0 * amp0 && std::abs(env - prev) < 0.05 * env)
            return Criticality::supercritical;
        prev = env;
    }
    return Criticality::inconclusive;
}

} // namespace

Criticality criticality_probe_full(double J, double epsilon, double a, double dtau) {
    if (dtau == 0.0) return Criticality::inconclusive;
    const auto hp = tau_full_hopf(a, J, epsilon, 0);
    SystemParams p;
    p.J = J;
    p.a = a;
    p.epsilon = epsilon;
    p.tau = hp.tau1 + dtau;

    const double amp0 = 1e-3;
    double T = std::min(2e5, std::max(4000.0, 60.0 / std::max(dtau, 1e-4)));
    for (int attempt = 0; attempt < 3; ++attempt) {
        SolverConfig cfg;
        cfg.T_discard = 0.0;
        cfg.T = T;
        cfg.history = State{a + amp0, p.fixed_point_y()};
        try {
            const auto tr = integrate(p, cfg);
            const auto v = probe_outcome(tr, a, amp0);
            if (v != Criticality::inconclusive || T >= 4e5) return v;
        } catch (const blowup_error&) {
            return Criticality::subcritical;
        }
        T = std::min(4e5, 4.0 * T); // growth too slow for this window; widen
    }
    return Criticality::inconclusive;
}

Criticality criticality_probe_fast(double J, double x_star, double dtau) {
    if (dtau == 0.0) return Criticality::inconclusive;
    const auto hp = tau_fast_hopf(x_star, J, 0);
    FastParams fp;
    fp.J = J;
    fp.tau = hp.tau + dtau;
    fp.y = hp.y;

    const double amp0 = 1e-3;
    double T = std::min(2e5, std::max(2000.0, 60.0 / std::max(dtau, 1e-4)));
    for (int attempt = 0; attempt < 3; ++attempt) {
        SolverConfig cfg;
        cfg.T_discard = 0.0;
        cfg.T = T;
        cfg.history = State{x_star + amp0, 0.0};
        try {
            const auto tr = integrate_fast(fp, cfg);
            const auto v = probe_outcome(tr, x_star, amp0);
            if (v != Criticality::inconclusive || T >= 4e5) return v;
        } catch (const blowup_error&) {
            return Criticality::subcritical;
        }
        T = std::min(4e5, 4.0 * T);
    }
    return Criticality::inconclusive;
}

BtLocalReport bt_local_check(double J) {
    if (!(J > 0.0)) throw domain_error("bt_local_check: J must be positive");
    BtLocalReport rep{};
    const double tau = 1.0 / J;
    // double zero of the fast characteristic function at x* = 1, J tau = 1
    rep.char_value_at_zero = std::abs(char_fn_fast(0.0, 1.0, J, tau));
    rep.char_deriv_at_zero = std::abs(char_fn_fast_d(0.0, 1.0, J, tau));
    rep.char_second_deriv = tau * tau * J; // d^2/dxi^2 [J e^(-xi tau)] at 0
    rep.tangency_residual = hopf_tangency_residual(J, std::sqrt(1.0 + 1e-3));

    // fit tau - 1/J = c sqrt(2/3 - y) on a geometric sequence approaching the fold;
    // parameterize by x* = -(1 + d) on the lower branch, y = x*^3/3 - x*.
    double num = 0.0, den = 0.0;
    for (double d = 1e-2; d >= 1e-4 / 1.01; d /= 4.0) {
        const double xs = -(1.0 + d);
        const double y = xs * xs * xs / 3.0 - xs;
        const double gap = 2.0 / 3.0 - y;
        const auto p = tau_fast_hopf(xs, J, 0);
        num += (p.tau - 1.0 / J) * std::sqrt(gap);
        den += gap;
    }
    rep.sqrt_coeff_fit = num / den;
    rep.sqrt_coeff_expected = 2.0 / (3.0 * J * J);
    return rep;
}

} // namespace dfhn
