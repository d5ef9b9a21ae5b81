#include "dfhn/manifold.hpp"

#include <algorithm>
#include <cmath>

namespace dfhn {

namespace {

constexpr double kFoldY = 2.0 / 3.0;
// The trigonometric formula plus Newton polishing stays well conditioned down
// to ~1e-13 from the fold; only effectively-exact fold values get the special
// double-root treatment.
constexpr double kFoldGuard = 1e-13;

double cubic(double x, double y) { return x - x * x * x / 3.0 + y; }
double cubic_d(double x) { return 1.0 - x * x; }

// Newton polishing on x - x^3/3 + y = 0; keeps every formula branch at 1e-12 residual.
double polish(double x, double y) {
    for (int i = 0; i < 5; ++i) {
        const double f = cubic(x, y);
        const double d = cubic_d(x);
        if (std::abs(d) < 1e-12) break; // double root: leave the seed value
        const double xn = x - f / d;
        if (!std::isfinite(xn)) break;
        x = xn;
        if (std::abs(cubic(x, y)) < 1e-14) break;
    }
    return x;
}

} // namespace

std::vector<CriticalPoint> critical_roots(double y) {
    if (!std::isfinite(y)) throw invalid_input("critical_roots: y not finite");
    std::vector<CriticalPoint> out;

    if (std::abs(std::abs(y) - kFoldY) <= kFoldGuard) {
        // fold: double root at -+1, simple root at +-2 (exact values plus a Newton step)
        const double s = (y > 0.0) ? 1.0 : -1.0;
        const double dbl = -s, simple = polish(2.0 * s, y);
        if (s > 0.0) {
            out.push_back({dbl, Branch::lower, Multiplicity::double_root});
            out.push_back({simple, Branch::upper, Multiplicity::simple});
        } else {
            out.push_back({simple, Branch::lower, Multiplicity::simple});
            out.push_back({dbl, Branch::upper, Multiplicity::double_root});
        }
        return out;
    }

    if (std::abs(y) > kFoldY) {
        // unique root by the radical formula on x^3 - 3x - 3y = 0
        const double disc = std::sqrt(9.0 * y * y - 4.0);
        const double t1 = std::cbrt((3.0 * y + disc) / 2.0);
        const double t2 = std::cbrt((3.0 * y - disc) / 2.0);
        const double x = polish(t1 + t2, y);
        out.push_back({x, Branch::unique, Multiplicity::simple});
        return out;
    }

    // three roots by the trigonometric formula
    const double phi = std::acos(std::clamp(1.5 * y, -1.0, 1.0)) / 3.0;
    double r[3];
    for (int k = 0; k < 3; ++k) r[k] = 2.0 * std::cos(phi + 2.0 * k * M_PI / 3.0);
    std::sort(r, r + 3);
    const Branch branches[3] = {Branch::lower, Branch::middle, Branch::upper};
    for (int k = 0; k < 3; ++k)
        out.push_back({polish(r[k], y), branches[k], Multiplicity::simple});
    return out;
}

double branch_eval(Branch branch, double y) {
    if (!std::isfinite(y)) throw invalid_input("branch_eval: y not finite");
    const double g = 1e-12;
    switch (branch) {
        case Branch::upper:
            if (y < -kFoldY - g) throw domain_error("x_+ defined for y >= -2/3");
            break;
        case Branch::lower:
            if (y > kFoldY + g) throw domain_error("x_- defined for y <= 2/3");
            break;
        case Branch::middle:
            if (std::abs(y) > kFoldY + g) throw domain_error("x_0 defined for |y| <= 2/3");
            break;
        case Branch::unique:
            if (std::abs(y) < kFoldY - g) throw domain_error("unique root needs |y| > 2/3");
            break;
    }
    const auto roots = critical_roots(y);
    if (branch == Branch::unique) return roots.front().x;
    if (branch == Branch::upper) {
        // for y > 2/3 the unique root continues x_+
        return roots.back().x;
    }
    if (branch == Branch::lower) return roots.front().x;
    // middle
    for (const auto& r : roots)
        if (r.branch == Branch::middle || r.multiplicity == Multiplicity::double_root) return r.x;
    throw domain_error("x_0 not present");
}

std::vector<GeneralEquilibrium> general_equilibria(double a, double b, double gamma) {
    if (gamma == 0.0)
        throw degenerate_parameters("gamma = 0: equilibria lie on the x = a line; use critical_roots");
    if (b == 0.0) throw degenerate_parameters("b = 0 not supported");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(gamma))
        throw invalid_input("general_equilibria: non-finite input");

    // x - x^3/3 + y = 0 with y = -(a + b x)/gamma  =>  x^3 + p x + q = 0,
    // p = -3(gamma - b)/gamma, q = 3 a/gamma.
    const double p = -3.0 * (gamma - b) / gamma;
    const double q = 3.0 * a / gamma;
    const double D = (q / 2.0) * (q / 2.0) + (p / 3.0) * (p / 3.0) * (p / 3.0);

    auto resid = [&](double x) { return x - x * x * x / 3.0 - (a + b * x) / gamma; };
    auto polish3 = [&](double x) {
        for (int i = 0; i < 6; ++i) {
            const double f = resid(x);
            const double d = 1.0 - x * x - b / gamma;
            if (std::abs(d) < 1e-10) break;
            x -= f / d;
            if (std::abs(resid(x)) < 1e-14) break;
        }
        return x;
    };

    std::vector<GeneralEquilibrium> out;
    auto add = [&](double x) {
        x = polish3(x);
        out.push_back({x, -(a + b * x) / gamma, D});
    };

    if (D > 0.0) {
        const double s = std::sqrt(D);
        add(std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s));
    } else if (D < 0.0) {
        // three real roots: x_k = 2 r cos((acos(3q/(2pr)) - 2 pi k)/3), r = sqrt(-p/3)
        const double r = std::sqrt(-p / 3.0);
        const double c = std::clamp(3.0 * q / (2.0 * p * r), -1.0, 1.0);
        const double ph = std::acos(c);
        for (int k = 0; k < 3; ++k) add(2.0 * r * std::cos((ph - 2.0 * M_PI * k) / 3.0));
        std::sort(out.begin(), out.end(),
                  [](const GeneralEquilibrium& u, const GeneralEquilibrium& v) { return u.x < v.x; });
    } else {
        add(3.0 * q / p);
        add(-3.0 * q / (2.0 * p));
    }
    return out;
}

} // namespace dfhn
