#include <doctest.h>

#include <cmath>
#include <random>

#include "dfhn/core.hpp"

using namespace dfhn;

TEST_CASE("full_rhs vanishes at the fixed point") {
    for (double a : {-2.0, 0.3, 1.01, 2.5}) {
        SystemParams p;
        p.a = a;
        p.J = 2.0;
        p.epsilon = 0.05;
        p.tau = 1.0;
        const State fp{a, a * a * a / 3.0 - a};
        const auto d = full_rhs(fp, a, p);
        CHECK(std::abs(d.dx) < 1e-14);
        CHECK(std::abs(d.dy) < 1e-14);
    }
}

TEST_CASE("full_rhs hand values") {
    SystemParams p;
    p.J = 2.0;
    p.epsilon = 0.05;
    p.a = 1.01;
    const auto d0 = full_rhs({0.0, 0.0}, 0.0, p);
    CHECK(d0.dx == 0.0);
    CHECK(d0.dy == doctest::Approx(0.0505).epsilon(1e-15));
    const auto d1 = full_rhs({1.0, 0.0}, 0.0, p);
    CHECK(d1.dx == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
    CHECK(d1.dy == doctest::Approx(0.0005).epsilon(1e-12));
}

TEST_CASE("fast_rhs values") {
    FastParams fp;
    fp.J = 2.0;
    fp.y = 2.0 / 3.0;
    CHECK(std::abs(fast_rhs(2.0, 2.0, fp)) < 1e-15);
    fp.y = 0.0;
    CHECK(fast_rhs(0.0, 1.0, fp) == doctest::Approx(-2.0));
    // critical-manifold point: x - x^3/3 + y = 0
    fp.y = 0.5;
    const double xs = 1.9;
    fp.y = xs * xs * xs / 3.0 - xs;
    CHECK(std::abs(fast_rhs(xs, xs, fp)) < 1e-14);
}

TEST_CASE("J = 0 reduces to the classical system; other structural identities") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        const State s{u(rng), u(rng)};
        const double xd = u(rng);
        SystemParams p;
        p.J = 0.0;
        p.a = u(rng);
        p.epsilon = 0.3;
        p.tau = 1.0;
        const auto d = full_rhs(s, xd, p);
        CHECK(d.dx == doctest::Approx(s.x - s.x * s.x * s.x / 3.0 + s.y).epsilon(1e-14));

        // delayed coupling vanishes on constant histories
        FastParams fp;
        fp.J = u(rng) + 3.5;
        fp.tau = 0.7;
        fp.y = u(rng);
        const double v1 = fast_rhs(s.x, s.x, fp);
        fp.J = 0.1;
        CHECK(fast_rhs(s.x, s.x, fp) == doctest::Approx(v1).epsilon(1e-14));

        // eps = 0 agrees with the fast subsystem in the first component
        SystemParams pz;
        pz.J = 2.0;
        pz.epsilon = 0.0;
        pz.a = u(rng);
        pz.tau = 1.0;
        FastParams f2;
        f2.J = 2.0;
        f2.tau = 1.0;
        f2.y = s.y;
        CHECK(full_rhs(s, xd, pz).dx == doctest::Approx(fast_rhs(s.x, xd, f2)).epsilon(1e-14));
    }
}

TEST_CASE("general slow equation with gamma, b") {
    SystemParams p;
    p.J = 0.0;
    p.epsilon = 0.1;
    p.a = 0.85;
    p.gamma = -0.3;
    p.b = -1.0;
    p.tau = 1.0;
    const auto d = full_rhs({0.5, 0.2}, 0.5, p);
    CHECK(d.dy == doctest::Approx(0.1 * (0.85 - 0.5 + (-0.3) * 0.2)).epsilon(1e-14));
}

TEST_CASE("non-finite inputs rejected") {
    SystemParams p;
    CHECK_THROWS_AS(full_rhs({std::nan(""), 0.0}, 0.0, p), invalid_input);
    FastParams fp;
    CHECK_THROWS_AS(fast_rhs(0.0, std::numeric_limits<double>::infinity(), fp), invalid_input);
    SystemParams bad;
    bad.tau = 0.0;
    CHECK_THROWS_AS(bad.validate(), invalid_input);
}
