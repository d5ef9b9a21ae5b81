#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dfhn/errors.hpp"

namespace dfhn {

/// Hopf point of the fast subsystem on branch k:
/// zeta = sqrt(x*^2-1) sqrt(2J+1-x*^2), tau = (acos((1-x*^2+J)/J) + 2k pi)/zeta.
struct HopfPointFast {
    double x_star;
    double y;    // x*^3/3 - x*
    double zeta; // Hopf frequency
    double tau;
    int k;
};

HopfPointFast tau_fast_hopf(double x_star, double J, int k);

/// Hopf branches of the full system:
/// A = sqrt((a^2-1)(1+2J-a^2)), zeta_{1,2} = (-A -+ sqrt(A^2+4eps))/2,
/// tau1 = 2(acos(1+(1-a^2)/J) + 2k pi)/(A+sqrt(A^2+4eps)),
/// tau2 = 2(acos(1+(1-a^2)/J) - 2(k+1) pi)/(A-sqrt(A^2+4eps)).
struct HopfPointFull {
    double a;
    double A;
    double zeta1;
    double zeta2;
    double tau1;
    double tau2;
    int k;
};

HopfPointFull tau_full_hopf(double a, double J, double epsilon, int k);

enum class CurveLabel {
    hopf_fast,
    hopf_full_1,
    hopf_full_2,
    saddle_node_plus,
    saddle_node_minus,
    bt_plus,
    bt_minus,
    homoclinic_approx,
    fold_of_cycles
};

struct CurveSample {
    double param; // a or x* (or tau for tau-independent lines)
    double tau;
    double y;
};

struct BifurcationCurve {
    CurveLabel label;
    int k = 0;
    std::vector<CurveSample> samples;
};

std::string curve_label_name(CurveLabel label);

/// Horizontal saddle-node lines y = +-2/3 (tau-independent), sampled over [tau_lo, tau_hi].
std::vector<BifurcationCurve> saddle_node_lines(double tau_lo = 0.0, double tau_hi = 2.0,
                                                int n = 33);

struct BtPoint {
    double tau;
    double y;
};

/// The two Bogdanov-Takens points (tau = 1/J, y = +-2/3).
std::pair<BtPoint, BtPoint> bt_points(double J);

/// Local saddle-homoclinic approximation near the BT point:
/// y = 2/3 - (98/25)(J tau - 1)^2 / tau, J tau > 1 (mirror at -y).
double bt_homoclinic_approx(double J, double tau);

/// tau_f^0(x*) minus its fold-tangency expansion 1/J + (x*^2-1)/(3 J^2);
/// the residual is O((x*^2-1)^2).
double hopf_tangency_residual(double J, double x_star);

/// Chebyshev-sampled curve families (256 points by default).
BifurcationCurve sample_fast_hopf(double J, int k, int n = 256);
BifurcationCurve sample_full_hopf(double J, double epsilon, int k, bool branch2, int n = 256);

struct ContinuityReport {
    int k;
    double mismatch_outer; // |tau1^k - tau2^k| at a = sqrt(1+2J)
    double mismatch_inner; // |tau2^k - tau1^(k+1)| at a = 1
    double endpoint_tau1_at_1;
    double endpoint_tau1_at_amax;
    double endpoint_tau2_at_1;
    double sqrt_slope_outer; // finite one-sided slope in sqrt(a_max - a)
    double sqrt_slope_inner; // finite one-sided slope in sqrt(a - 1) for tau2 <-> tau1^(k+1)
};

ContinuityReport full_curve_continuity_check(double J, double epsilon, int k);

struct BautinResult {
    std::optional<double> tau_s; // observable (probe-based) criticality transition
    std::optional<double> a_s;
    std::optional<double> ell1_sign_change_tau; // strict first-Lyapunov sign change, if in range
    bool probe_verified_below = false;          // supercritical just below tau_s
    bool probe_verified_above = false;          // subcritical just above tau_s
    std::string note;
};

/// Locates the criticality transition along tau_1^0 by bisecting the
/// criticality_probe outcome (probe offset scaled with sqrt(eps)); the strict
/// ell1 sign change along the sampled curve is reported alongside when found.
BautinResult bautin_locate(double J, double epsilon, double tau_tol = 1e-4);

} // namespace dfhn
