#pragma once

#include <array>
#include <complex>
#include <vector>

#include "dfhn/bifurcation.hpp"
#include "dfhn/errors.hpp"
#include "dfhn/manifold.hpp"

namespace dfhn {

using cplx2 = std::array<std::complex<double>, 2>;

/// Intermediate data of the center-manifold reduction at a Hopf point.
/// Profiles are sampled on a uniform theta-grid over [-tau, 0].
struct NormalFormWorkspace {
    double omega = 0.0;
    double tau = 0.0;
    cplx2 right_eigvec{};                // v, normalized v_x = 1
    cplx2 left_eigvec{};                 // row vector for +i omega
    std::complex<double> pairing = 0.0;  // <psi, phi> before normalization
    std::complex<double> g20{}, g11{}, g02{}, g21{};
    cplx2 E20{}, E11{};                  // constant parts of the h profiles
    std::vector<double> theta;           // profile grid
    std::vector<cplx2> h20, h11;         // quadratic profiles on the grid
    double pairing_residual = 0.0;       // |<psi_n, phi_n> - 1| after normalization
    double bc_residual = 0.0;            // boundary-condition residual of the h profiles
    double convergence_delta = 0.0;      // relative ell1 change on doubling the quadrature
    double a1 = 0.0;                     // J tau^2 / (2 (1 - J tau)), diverges at J tau = 1
    double nu = 0.0;                     // J tau - 1
};

enum class Criticality { supercritical, subcritical, inconclusive };

struct LyapunovResult {
    double ell1;
    int sign;                 // -1 or +1
    Criticality criticality;  // negative => supercritical
    NormalFormWorkspace workspace;
};

/// First Lyapunov coefficient at the primary Hopf point (a, tau_1^0(a)).
/// Reported in the singularly rescaled amplitude units (x/sqrt(eps)), the
/// scale in which the small-J*tau asymptote is -sqrt(eps)/8.
LyapunovResult lyap1_full(double J, double epsilon, double a_on_hopf);

/// Same machinery for the scalar fast subsystem at (x*(branch, y), tau_f^0).
LyapunovResult lyap1_fast(double J, double y_on_hopf, Branch branch);
LyapunovResult lyap1_fast_x(double J, double x_star);

/// Simulation oracle: integrates from a small perturbation just past the Hopf
/// point; saturation at the O(sqrt(dtau)) scale reads supercritical, escape
/// beyond the small-cycle scale reads subcritical.
Criticality criticality_probe_full(double J, double epsilon, double a_on_hopf,
                                   double dtau = 5e-3);
Criticality criticality_probe_fast(double J, double x_star, double dtau = 5e-3);

struct BtLocalReport {
    double char_value_at_zero;   // |F(0)| at (x* = 1, tau = 1/J)
    double char_deriv_at_zero;   // |F'(0)|
    double char_second_deriv;    // F''(0) = tau^2 J = 1/J, nonzero
    double tangency_residual;    // hopf_tangency_residual at x*^2 = 1 + 1e-3
    double sqrt_coeff_fit;       // fitted c in tau = 1/J + c sqrt(2/3 - y)
    double sqrt_coeff_expected;  // 2/(3 J^2)
};

/// The three computable BT signatures at (y = 2/3, tau = 1/J).
BtLocalReport bt_local_check(double J);

} // namespace dfhn
