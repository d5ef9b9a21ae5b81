#pragma once

#include <cmath>

#include "dfhn/errors.hpp"

namespace dfhn {

/// Parameters of the delayed FitzHugh-Nagumo system
///   x' = x - x^3/3 + y + J (x(t) - x(t - tau))
///   y' = eps (a + b x + gamma y)
/// The defaults b = -1, gamma = 0 give the slow equation y' = eps (a - x).
struct SystemParams {
    double J = 2.0;
    double a = 1.01;
    double epsilon = 0.05;
    double tau = 1.0;
    double gamma = 0.0;
    double b = -1.0;

    void validate() const {
        if (!(tau > 0.0)) throw invalid_input("tau must be positive");
        if (!(epsilon >= 0.0)) throw invalid_input("epsilon must be >= 0");
        if (!std::isfinite(J) || !std::isfinite(a) || !std::isfinite(epsilon) ||
            !std::isfinite(tau) || !std::isfinite(gamma) || !std::isfinite(b))
            throw invalid_input("non-finite parameter");
    }

    // Unique fixed point for gamma = 0, b = -1: (a, a^3/3 - a).
    double fixed_point_y() const { return a * a * a / 3.0 - a; }
};

struct State {
    double x = 0.0;
    double y = 0.0;
};

/// Fast subsystem x' = x - x^3/3 + y + J (x(t) - x(t - tau)), y frozen.
struct FastParams {
    double J = 2.0;
    double tau = 1.0;
    double y = 0.0;

    void validate() const {
        if (!(tau > 0.0)) throw invalid_input("tau must be positive");
        if (!std::isfinite(J) || !std::isfinite(y) || !std::isfinite(tau))
            throw invalid_input("non-finite parameter");
    }
};

struct Deriv {
    double dx = 0.0;
    double dy = 0.0;
};

inline Deriv full_rhs(const State& now, double x_delayed, const SystemParams& p) {
    if (!std::isfinite(now.x) || !std::isfinite(now.y) || !std::isfinite(x_delayed))
        throw invalid_input("non-finite state in full_rhs");
    Deriv d;
    d.dx = now.x - now.x * now.x * now.x / 3.0 + now.y + p.J * (now.x - x_delayed);
    d.dy = p.epsilon * (p.a + p.b * now.x + p.gamma * now.y);
    return d;
}

inline double fast_rhs(double x_now, double x_delayed, const FastParams& fp) {
    if (!std::isfinite(x_now) || !std::isfinite(x_delayed))
        throw invalid_input("non-finite state in fast_rhs");
    return x_now - x_now * x_now * x_now / 3.0 + fp.y + fp.J * (x_now - x_delayed);
}

} // namespace dfhn
