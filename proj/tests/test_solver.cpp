#include <doctest.h>

#include <cmath>

#include "dfhn/solver.hpp"

using namespace dfhn;

namespace {

// synthetic trajectory from an analytic signal (for dense-output/event tests)
Trajectory make_test_trajectory(double (*f)(double), double (*df)(double), double tau, int m,
                                double T) {
    Trajectory tr(tau, m, /*fast=*/true, /*frozen_y=*/0.0, /*t_discard=*/0.0);
    const double h = tau / m;
    const auto n = static_cast<std::size_t>(std::llround(T / h)) + m;
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = (static_cast<double>(i) - m) * h;
        tr.push_node(f(t), 0.0, df(t), 0.0);
    }
    return tr;
}

} // namespace

TEST_CASE("equilibrium invariance") {
    SystemParams p;
    p.J = 2.0;
    p.epsilon = 0.05;
    p.a = 1.01;
    p.tau = 1.0;
    SolverConfig cfg;
    cfg.T = 100.0;
    cfg.T_discard = 0.0;
    cfg.history = State{p.a, p.fixed_point_y()};
    const auto tr = integrate(p, cfg);
    double dev = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i)
        dev = std::max({dev, std::abs(tr.x()[i] - p.a), std::abs(tr.y()[i] - p.fixed_point_y())});
    CHECK(dev < 1e-12 * cfg.T);
}

TEST_CASE("J = 0 limit agrees with a reference ODE integration to O(h^4)") {
    SystemParams p;
    p.J = 0.0;
    p.epsilon = 0.3;
    p.a = 0.9;
    p.tau = 0.5; // the delay is inert at J = 0

    auto run = [&](double h_max) {
        SolverConfig cfg;
        cfg.T = 10.0;
        cfg.T_discard = 0.0;
        cfg.h_max = h_max;
        cfg.history = State{1.5, 0.2};
        const auto tr = integrate(p, cfg);
        return tr.dense_eval(10.0);
    };
    const auto fine = run(0.5 / 512);
    const auto h1 = run(0.5 / 16);
    const auto h2 = run(0.5 / 32);
    const double e1 = std::abs(h1.x - fine.x);
    const double e2 = std::abs(h2.x - fine.x);
    const double order = std::log2(e1 / e2);
    CHECK(order > 3.7);
    CHECK(order < 4.3);
}

TEST_CASE("dense_eval: exact at nodes, reproduces cubics, O(h^4) between") {
    // cubic signal is reproduced exactly by the Hermite interpolant
    auto cubic = [](double t) { return ((t - 1.0) * t + 2.0) * t - 0.5; };
    auto dcubic = [](double t) { return (3.0 * t - 2.0) * t + 2.0; };
    Trajectory tr(1.0, 10, true, 0.0, 0.0);
    for (int i = 0; i <= 40; ++i) {
        const double t = (i - 10) * 0.1;
        tr.push_node(cubic(t), 0.0, dcubic(t), 0.0);
    }
    CHECK(tr.dense_x(0.5) == doctest::Approx(cubic(0.5)).epsilon(1e-15));
    CHECK(tr.dense_x(1.234) == doctest::Approx(cubic(1.234)).epsilon(1e-15));
    CHECK(tr.dense_x(tr.node_time(17)) == tr.x()[17]); // node exact

    // halving h reduces the dense error 16-fold on a smooth signal
    auto err_at = [](int m) {
        const auto t2 = make_test_trajectory([](double t) { return std::sin(t); },
                                             [](double t) { return std::cos(t); }, 1.0, m, 3.0);
        double e = 0.0;
        for (double t = 0.05; t < 3.0; t += 0.1)
            e = std::max(e, std::abs(t2.dense_x(t) - std::sin(t)));
        return e;
    };
    const double r = err_at(8) / err_at(16);
    CHECK(r > 10.0);
    CHECK(r < 22.0);

    CHECK_THROWS_AS(tr.dense_eval(100.0), out_of_range_error);
}

TEST_CASE("detect_crossings") {
    SUBCASE("constant trajectory: empty") {
        SystemParams p;
        p.a = 1.3;
        p.J = 2.0;
        p.epsilon = 0.05;
        p.tau = 0.5;
        SolverConfig cfg;
        cfg.T = 20.0;
        cfg.T_discard = 0.0;
        cfg.history = State{p.a, p.fixed_point_y()};
        const auto tr = integrate(p, cfg);
        EventSpec ev;
        ev.coordinate = EventCoordinate::x;
        ev.level = 0.7;
        ev.direction = EventDirection::both;
        CHECK(detect_crossings(tr, ev).empty());
    }
    SUBCASE("sine signal: up-crossings of zero at 2 pi k within 1e-8") {
        const auto tr = make_test_trajectory([](double t) { return std::sin(t); },
                                             [](double t) { return std::cos(t); }, 1.0, 100, 40.0);
        EventSpec ev;
        ev.coordinate = EventCoordinate::x;
        ev.level = 0.0;
        ev.direction = EventDirection::up;
        const auto cs = detect_crossings(tr, ev);
        REQUIRE(cs.size() >= 6);
        for (const auto& c : cs) {
            const double k = std::round(c.t / (2.0 * M_PI));
            CHECK(std::abs(c.t - 2.0 * M_PI * k) < 1e-8);
        }
    }
}

TEST_CASE("determinism: identical configs give bit-identical trajectories") {
    SystemParams p;
    p.J = 2.0;
    p.epsilon = 0.05;
    p.a = 1.01;
    p.tau = 0.7;
    SolverConfig cfg;
    cfg.T = 50.0;
    cfg.T_discard = 0.0;
    const auto t1 = integrate(p, cfg);
    const auto t2 = integrate(p, cfg);
    REQUIRE(t1.size() == t2.size());
    for (std::size_t i = 0; i < t1.size(); ++i) {
        CHECK(t1.x()[i] == t2.x()[i]);
        CHECK(t1.y()[i] == t2.y()[i]);
    }
}

TEST_CASE("step layout and validation") {
    SystemParams p;
    p.tau = 0.7;
    SolverConfig cfg;
    cfg.T = 5.0;
    cfg.T_discard = 0.0;
    const auto tr = integrate(p, cfg);
    // h divides tau exactly and m >= 4
    CHECK(tr.m() >= 4);
    CHECK(tr.h() * tr.m() == doctest::Approx(p.tau).epsilon(1e-15));

    SolverConfig bad;
    bad.T = 10.0;
    bad.T_discard = 10.0;
    CHECK_THROWS_AS(integrate(p, bad), invalid_config);

    SolverConfig blow;
    blow.T = 5.0;
    blow.T_discard = 0.0;
    blow.history = State{2e6, 0.0};
    CHECK_THROWS_AS(integrate(p, blow), blowup_error);
}

TEST_CASE("derivative at stored nodes equals the RHS there") {
    SystemParams p;
    p.J = 2.0;
    p.epsilon = 0.05;
    p.a = 1.01;
    p.tau = 0.5;
    SolverConfig cfg;
    cfg.T = 10.0;
    cfg.T_discard = 0.0;
    cfg.history = State{0.3, -0.1};
    const auto tr = integrate(p, cfg);
    for (std::size_t i = tr.m(); i < tr.size(); i += 7) {
        const double xd = tr.x()[i - tr.m()];
        const auto d = full_rhs({tr.x()[i], tr.y()[i]}, xd, p);
        CHECK(tr.dx()[i] == doctest::Approx(d.dx).epsilon(1e-15));
        CHECK(tr.dy()[i] == doctest::Approx(d.dy).epsilon(1e-15));
    }
}
