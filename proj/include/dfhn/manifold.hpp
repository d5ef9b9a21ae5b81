#pragma once

#include <vector>

#include "dfhn/errors.hpp"

namespace dfhn {

enum class Branch { lower, middle, upper, unique };
enum class Multiplicity { simple, double_root };

/// Equilibrium of the fast subsystem: root of x - x^3/3 + y = 0.
struct CriticalPoint {
    double x;
    Branch branch;
    Multiplicity multiplicity;
};

/// Roots sorted ascending; 1 root for |y| > 2/3, 3 for |y| < 2/3,
/// a double root plus a simple one at y = +-2/3.
std::vector<CriticalPoint> critical_roots(double y);

/// Branch domains: upper y >= -2/3, lower y <= 2/3, middle |y| <= 2/3.
double branch_eval(Branch branch, double y);

/// Fixed point of the gamma != 0 system (y-equation eps(a + b x + gamma y) = 0).
struct GeneralEquilibrium {
    double x;
    double y;
    double discriminant; // Cardano D = (q/2)^2 + (p/3)^3; D > 0 <=> unique real root
};

std::vector<GeneralEquilibrium> general_equilibria(double a, double b, double gamma);

} // namespace dfhn
