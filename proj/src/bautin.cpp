#include <cmath>

#include "dfhn/bifurcation.hpp"
#include "dfhn/normal_form.hpp"

namespace dfhn {

namespace {

double a_of_tau1(double J, double epsilon, double tau) {
    double lo = 1.0 + 1e-14, hi = std::sqrt(1.0 + 2.0 * J) - 1e-14;
    if (tau_full_hopf(hi, J, epsilon, 0).tau1 < tau)
        throw domain_error("tau beyond the tau_1^0 branch");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (tau_full_hopf(mid, J, epsilon, 0).tau1 < tau)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

BautinResult bautin_locate(double J, double epsilon, double tau_tol) {
    if (!(epsilon > 0.0)) throw domain_error("bautin_locate: epsilon must be positive");
    BautinResult res;

    // probe offset scaled so the probe amplitude is eps-uniform
    const double dtau = 5e-3 * std::sqrt(epsilon / 0.01);

    auto escape = [&](double tau) {
        const double a = a_of_tau1(J, epsilon, tau);
        const auto v = criticality_probe_full(J, epsilon, a, dtau);
        if (v == Criticality::inconclusive)
            throw non_convergent("criticality probe inconclusive at tau = " + std::to_string(tau));
        return v == Criticality::subcritical;
    };

    // bracket the observable transition around 1/J
    double lo = 0.6 / J, hi = 1.6 / J;
    if (escape(lo) || !escape(hi)) {
        res.note = "no supercritical-to-subcritical probe transition in [0.6/J, 1.6/J]";
        return res;
    }
    while (hi - lo > tau_tol) {
        const double mid = 0.5 * (lo + hi);
        if (escape(mid))
            hi = mid;
        else
            lo = mid;
    }
    res.tau_s = 0.5 * (lo + hi);
    res.a_s = a_of_tau1(J, epsilon, *res.tau_s);
    res.probe_verified_below = !escape(*res.tau_s - 1e-2);
    res.probe_verified_above = escape(*res.tau_s + 1e-2);

    // strict ell1 sign change along the sampled curve (may sit far from the
    // observable transition; see the lyapunov docs)
    const double amax = std::sqrt(1.0 + 2.0 * J);
    double prev_a = 0.0, prev_l = 0.0;
    bool have_prev = false;
    for (int i = 1; i <= 160; ++i) {
        const double a = 1.0 + (amax - 1.0 - 2e-6) * i / 161.0 + 1e-6;
        double l;
        try {
            l = lyap1_full(J, epsilon, a).ell1;
        } catch (const error&) {
            continue;
        }
        if (have_prev && l * prev_l < 0.0) {
            double alo = prev_a, ahi = a;
            for (int it = 0; it < 60; ++it) {
                const double am = 0.5 * (alo + ahi);
                if (lyap1_full(J, epsilon, am).ell1 * prev_l > 0.0)
                    alo = am;
                else
                    ahi = am;
            }
            res.ell1_sign_change_tau = tau_full_hopf(0.5 * (alo + ahi), J, epsilon, 0).tau1;
            break;
        }
        prev_a = a;
        prev_l = l;
        have_prev = true;
    }
    return res;
}

} // namespace dfhn
