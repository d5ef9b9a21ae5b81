#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "dfhn/errors.hpp"

namespace dfhn {

using cplx = std::complex<double>;

/// Fast subsystem linearized at x*: xi - (1 - x*^2 + J) + J e^(-xi tau).
cplx char_fn_fast(cplx xi, double x_star, double J, double tau);
cplx char_fn_fast_d(cplx xi, double x_star, double J, double tau);

/// Full system linearized at (a, a^3/3 - a): xi (xi - 1 + a^2 - J(1 - e^(-xi tau))) + eps.
cplx char_fn_full(cplx xi, double a, double J, double tau, double epsilon);
cplx char_fn_full_d(cplx xi, double a, double J, double tau, double epsilon);

/// gamma != 0 generalization; reduces exactly to char_fn_full at gamma = 0.
cplx char_fn_general(cplx xi, double x_star, double J, double tau, double epsilon, double gamma);
cplx char_fn_general_d(cplx xi, double x_star, double J, double tau, double epsilon, double gamma);

struct CharacteristicRoot {
    cplx value;
    std::optional<int> branch; // Lambert branch index when applicable
    double residual;
};

/// Characteristic roots of the fast system via xi = A + W_k(-tau J e^(-tau A))/tau,
/// A = 1 - x*^2 + J, for k in [-K, K]; Newton-polished, upper-half-plane
/// representatives plus real roots, sorted by descending real part.
std::vector<CharacteristicRoot> fast_roots(double x_star, double J, double tau, int K = 8);

enum class Verdict { stable, unstable, marginal };

struct StabilityReport {
    double rightmost_real_part;
    std::vector<CharacteristicRoot> roots_found;
    Verdict verdict;
};

constexpr double kMarginalTol = 1e-8;

/// Rightmost characteristic root of the full system by argument-principle
/// counting on rectangles (auto-expanded) plus Newton polishing.
StabilityReport full_rightmost_root(double a, double J, double tau, double epsilon);

/// Root-dump CSV: re,im,branch,residual.
void write_roots_csv(const std::string& path, const std::vector<CharacteristicRoot>& roots);

} // namespace dfhn
