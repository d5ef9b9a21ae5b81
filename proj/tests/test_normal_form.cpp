#include <doctest.h>

#include <cmath>

#include "dfhn/normal_form.hpp"

using namespace dfhn;

namespace {

// invert tau_1^0(a) on (1, sqrt(1+2J))
double a_for_tau(double J, double eps, double tau) {
    double lo = 1.0 + 1e-14, hi = std::sqrt(1.0 + 2.0 * J) - 1e-14;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (tau_full_hopf(mid, J, eps, 0).tau1 < tau)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("lyap1_full matches the small-J*tau asymptote") {
    const double J = 2.0;
    for (double eps : {1e-3, 1e-4}) {
        for (double Jtau : {0.05, 0.10}) {
            const double a = a_for_tau(J, eps, Jtau / J);
            const auto r = lyap1_full(J, eps, a);
            const double ref = -std::sqrt(eps) / 8.0;
            CHECK(r.ell1 < 0.0);
            CHECK(std::abs(r.ell1 / ref - 1.0) < 0.2);
            CHECK(r.criticality == Criticality::supercritical);
        }
    }
}

TEST_CASE("lyap1_full workspace invariants") {
    const auto r = lyap1_full(2.0, 0.01, 1.4);
    CHECK(r.workspace.pairing_residual < 1e-10);
    CHECK(r.workspace.bc_residual < 1e-8);
    CHECK(r.workspace.convergence_delta < 1e-6);
    CHECK(r.workspace.omega == doctest::Approx(std::abs(tau_full_hopf(1.4, 2.0, 0.01, 0).zeta1)));
    CHECK(r.workspace.nu == doctest::Approx(2.0 * r.workspace.tau - 1.0));
    CHECK_THROWS_AS(lyap1_full(2.0, 0.01, std::sqrt(5.0) + 0.1), domain_error);
}

TEST_CASE("lyap1_fast: positive along the curve, divergence at BT, decay at the far end") {
    const double J = 2.0;
    double at_12 = 0.0;
    for (double y : {-1.2, -1.0, -0.8}) {
        const auto r = lyap1_fast(J, y, Branch::lower);
        CHECK(r.ell1 > 0.0);
        CHECK(r.criticality == Criticality::subcritical);
        if (y == -1.2) at_12 = r.ell1;
    }
    // decays toward the far end of the curve (y -> -(2/3) sqrt(1+2J)(J-1))
    CHECK(lyap1_fast(J, -1.48, Branch::lower).ell1 < at_12);
    // grows toward the BT along the mirror branch (x_+ -> 1, y -> -2/3)
    const double l1 = lyap1_fast_x(J, std::sqrt(1.0 + 0.3)).ell1;
    const double l2 = lyap1_fast_x(J, std::sqrt(1.0 + 0.1)).ell1;
    const double l3 = lyap1_fast_x(J, std::sqrt(1.0 + 0.02)).ell1;
    CHECK(l1 > 0.0);
    CHECK(l2 > l1);
    CHECK(l3 > l2);
}

TEST_CASE("criticality probes") {
    // supercritical side behavior just past the primary Hopf (small stable cycle)
    CHECK(criticality_probe_full(2.0, 0.05, 1.01, 5e-3) == Criticality::supercritical);
    // fast system just above tau_f^0 escapes (subcritical)
    const double xs = branch_eval(Branch::lower, -1.0);
    CHECK(criticality_probe_fast(2.0, xs, 5e-3) == Criticality::subcritical);
    // zero offset is inconclusive by construction
    CHECK(criticality_probe_full(2.0, 0.05, 1.01, 0.0) == Criticality::inconclusive);
}

TEST_CASE("probe agrees with the ell1 sign on the supercritical stretch") {
    // J tau < 1 at eps = 0.01: both read supercritical
    const double a = a_for_tau(2.0, 0.01, 0.45);
    CHECK(lyap1_full(2.0, 0.01, a).ell1 < 0.0);
    CHECK(criticality_probe_full(2.0, 0.01, a, 5e-3) == Criticality::supercritical);
    // past the observable transition the default-offset probe escapes
    const double a2 = a_for_tau(2.0, 0.01, 0.56);
    CHECK(criticality_probe_full(2.0, 0.01, a2, 5e-3) == Criticality::subcritical);
}

TEST_CASE("bt_local_check signatures") {
    for (double J : {1.5, 2.0}) {
        const auto rep = bt_local_check(J);
        CHECK(rep.char_value_at_zero == 0.0);
        CHECK(rep.char_deriv_at_zero == 0.0);
        CHECK(rep.char_second_deriv == doctest::Approx(1.0 / J).epsilon(1e-14));
        CHECK(std::abs(rep.tangency_residual) < 1e-5);
        CHECK(std::abs(rep.sqrt_coeff_fit / rep.sqrt_coeff_expected - 1.0) < 0.1);
    }
    // the mirror fold gives the identical fit by the y -> -y symmetry:
    // tau_fast_hopf depends on x* only through x*^2
    CHECK(tau_fast_hopf(-1.3, 2.0, 0).tau == doctest::Approx(tau_fast_hopf(1.3, 2.0, 0).tau));
}

TEST_CASE("bautin locator (desk-scale check at one eps)") {
    const auto res = bautin_locate(2.0, 0.01, 1e-3);
    REQUIRE(res.tau_s.has_value());
    CHECK(*res.tau_s > 0.45);
    CHECK(*res.tau_s < 0.55);
    CHECK(res.probe_verified_below);
    CHECK(res.probe_verified_above);
}
