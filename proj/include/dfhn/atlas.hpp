#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dfhn/manifold.hpp"
#include "dfhn/solver.hpp"

namespace dfhn {

enum class Regime {
    stationary,
    small_cycle,
    relaxation,
    mmo,
    fast_spiking,
    bursting,
    torus_canard_like,
    chaotic,
    unclassified
};

std::string regime_name(Regime r);

struct OrbitStats {
    int large_count = 0;  // per detected period when periodic, else per window
    int small_count = 0;
    std::optional<double> period;
    double x_amplitude = 0.0;
    double mean_interpeak = 0.0;
    double lambda_hat = 0.0;
    std::optional<int> poincare_period;
};

struct RegimeLabel {
    Regime regime = Regime::unclassified;
    OrbitStats stats;
};

/// Decision thresholds of the classifier; every constant is overridable.
struct ClassifyConfig {
    double large_amp = 2.0;        // peak-to-peak amplitude of a LARGE oscillation
    double small_amp_lo = 1e-3;    // SMALL band is (small_amp_lo, small_amp_hi)
    double small_amp_hi = 0.5;
    double fast_interpeak = 5.0;   // fast epoch: inter-peak interval < fast_interpeak * tau
    double quiescent_span = 10.0;  // quiescent epoch: no extrema for > quiescent_span * tau
    int min_burst_peaks = 3;
    double spiking_y_excursion = 0.3;   // fast spiking keeps y near one level (~0.2 at eps = 0.05)
    double chaos_lambda = 0.01;
    int max_poincare_period = 32;
    double period_tol = 1e-3;      // scaled by orbit amplitude
    double envelope_variation = 0.2; // torus-canard-like amplitude modulation
};

/// Local extremum of x(t), refined on the Hermite interpolant.
struct Extremum {
    double t;
    double x;
    bool maximum;
};

std::vector<Extremum> extract_extrema(const Trajectory& tr, double t_from);

RegimeLabel classify(const SystemParams& p, const SolverConfig& cfg,
                     const ClassifyConfig& cc = {});

/// Ordered x(t-tau) values at up-crossings of y = level after the transient.
std::vector<double> poincare_sequence(const Trajectory& tr, double level);

/// Two-trajectory divergence-rate estimate: 1e-8 history perturbation,
/// renormalized every tau, log growth averaged after the transient.
double divergence_rate(const SystemParams& p, const SolverConfig& cfg,
                       int min_renorms = 200);

enum class FastAttractor { fixed_point_lower, fixed_point_upper, cycle, other };

struct CycleAverage {
    double m;
    enum class Kind { fixed_point, cycle } kind;
    std::optional<double> period;
};

/// Long-run temporal average of x for the fast subsystem at frozen y.
CycleAverage cycle_average(const FastParams& fp, const SolverConfig& cfg);

struct AugmentedPoint {
    double y;
    std::optional<double> m_small;  // from a history near the upper branch
    std::optional<double> m_large;  // from a large-amplitude history
    bool cycle_small = false;
    bool cycle_large = false;
    std::vector<double> branch_x;   // critical-manifold roots at this y
    std::vector<bool> branch_stable;
    bool converged = true;
};

struct AugmentedSlowManifold {
    double J, tau;
    std::vector<AugmentedPoint> points;
    Regime predict(double a) const; // stationary / fast_spiking / bursting
};

AugmentedSlowManifold augmented_manifold(double J, double tau, const std::vector<double>& y_grid);

/// Fold of the large stable fast cycle: bisection in y at fixed tau.
double flc_locate(double J, double tau, double y_tol = 1e-4);

struct BasinInterval {
    double lower_inner, lower_outer; // bracket of the lower basin edge
    double upper_inner, upper_outer; // bracket of the upper basin edge
};

/// Basin-boundary proxy for the unstable fast cycle: bisection over the
/// constant-history level around the stable point (1e-4 brackets).
BasinInterval unstable_cycle_bracket(const FastParams& fp);

enum class HomoclinicKind { point_to_point, point_to_cycle };

struct HomoclinicEstimate {
    double tau;
    HomoclinicKind kind;
    bool approximate = true; // basin-boundary construct, not a continued manifold
};

/// Approximate saddle-homoclinic locations at fixed y: tau values where the
/// outcome of a near-saddle probe changes class. Sh1-like transitions are
/// point-to-point, Sh2-like are point-to-cycle.
std::vector<HomoclinicEstimate> homoclinic_proxy(double J, double y, double tau_lo = 0.0,
                                                 double tau_hi = 0.0, double tau_tol = 2e-4);

struct PortraitCurve {
    std::vector<double> x_delayed;
    std::vector<double> x;
};

/// Post-transient (x(t-tau), x(t)) projections for each initial history.
std::vector<PortraitCurve> portrait(const FastParams& fp, const std::vector<HistoryInit>& histories,
                                    const SolverConfig& cfg);

struct AtlasEntry {
    SystemParams params;
    RegimeLabel label;
    std::string error; // nonempty when the point failed (e.g. blow-up)
};

/// Parallel classification sweep; results are merged in grid order regardless
/// of worker scheduling.
std::vector<AtlasEntry> atlas_sweep(const std::vector<SystemParams>& grid,
                                    const SolverConfig& cfg, const ClassifyConfig& cc,
                                    int workers);

} // namespace dfhn
