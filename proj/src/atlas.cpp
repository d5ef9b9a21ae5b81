#include "dfhn/atlas.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <thread>

#include "dfhn/spectrum.hpp"

namespace dfhn {

std::string regime_name(Regime r) {
    switch (r) {
        case Regime::stationary: return "Stationary";
        case Regime::small_cycle: return "SmallCycle";
        case Regime::relaxation: return "Relaxation";
        case Regime::mmo: return "MMO";
        case Regime::fast_spiking: return "FastSpiking";
        case Regime::bursting: return "Bursting";
        case Regime::torus_canard_like: return "TorusCanardLike";
        case Regime::chaotic: return "Chaotic";
        case Regime::unclassified: return "Unclassified";
    }
    return "?";
}

namespace {

double hermite_deriv(double s, double h, double xa, double xb, double da, double db) {
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * xa + (3 * s2 - 4 * s + 1) * h * da + (-6 * s2 + 6 * s) * xb +
            (3 * s2 - 2 * s) * h * db) /
           h;
}

} // namespace

std::vector<Extremum> extract_extrema(const Trajectory& tr, double t_from) {
    std::vector<Extremum> out;
    const auto& x = tr.x();
    const auto& dx = tr.dx();
    const double h = tr.h();
    auto i0 = static_cast<std::size_t>(
        std::max(0.0, std::ceil((t_from - tr.t_begin()) / h)));
    for (std::size_t i = std::max<std::size_t>(i0, 1); i + 1 < x.size(); ++i) {
        const double da = dx[i], db = dx[i + 1];
        if (da == 0.0) {
            if (dx[i - 1] > 0.0 && db < 0.0) out.push_back({tr.node_time(i), x[i], true});
            if (dx[i - 1] < 0.0 && db > 0.0) out.push_back({tr.node_time(i), x[i], false});
            continue;
        }
        if (da * db >= 0.0) continue;
        // refine the derivative zero on the Hermite segment
        double lo = 0.0, hi = 1.0, flo = da;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = hermite_deriv(mid, h, x[i], x[i + 1], da, db);
            if ((flo < 0.0) == (fm < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        const double s = 0.5 * (lo + hi);
        const double t = tr.node_time(i) + s * h;
        out.push_back({t, tr.dense_x(t), da > 0.0});
    }
    return out;
}

namespace {

// Prune to alternating extrema with swing above `min_amp` (noise filter).
std::vector<Extremum> significant_extrema(const std::vector<Extremum>& ext, double min_amp) {
    std::vector<Extremum> out;
    for (const auto& e : ext) {
        if (out.empty()) {
            out.push_back(e);
            continue;
        }
        if (e.maximum == out.back().maximum) {
            // keep the more extreme of the pair
            if ((e.maximum && e.x > out.back().x) || (!e.maximum && e.x < out.back().x))
                out.back() = e;
            continue;
        }
        if (std::abs(e.x - out.back().x) < min_amp) {
            // swing too small: drop the pair head unless it started the list
            if (out.size() == 1)
                out.back() = e;
            else
                out.pop_back();
            continue;
        }
        out.push_back(e);
    }
    return out;
}

struct PoincareState {
    double t;
    double x;
    double xd;
};

std::vector<PoincareState> section_states(const Trajectory& tr, double level) {
    EventSpec ev;
    ev.coordinate = EventCoordinate::y;
    ev.level = level;
    ev.direction = EventDirection::up;
    std::vector<PoincareState> out;
    for (const auto& c : detect_crossings(tr, ev)) out.push_back({c.t, c.state.x, c.x_delayed});
    return out;
}

std::optional<int> nearest_return_period(const std::vector<PoincareState>& pts, double tol,
                                         int pmax) {
    const int n = static_cast<int>(pts.size());
    if (n < 6) return std::nullopt;
    for (int p = 1; p <= std::min(pmax, n / 2); ++p) {
        bool ok = true;
        const int checks = std::min(8, n - p - 1);
        for (int c = 0; c < checks && ok; ++c) {
            const int i = n - 1 - p - c;
            if (i < 0) break;
            const double d = std::hypot(pts[i].x - pts[i + p].x, pts[i].xd - pts[i + p].xd);
            if (d > tol) ok = false;
        }
        if (ok) return p;
    }
    return std::nullopt;
}

enum class OscSize { small, large, ambiguous, below };

OscSize oscillation_size(const Extremum& a, const Extremum& b, const ClassifyConfig& cc) {
    const double amp = std::abs(b.x - a.x);
    if (amp <= cc.small_amp_lo) return OscSize::below;
    if (amp > cc.large_amp) return OscSize::large;
    if (amp < cc.small_amp_hi) return OscSize::small;
    // dead zone [0.5, 2]: decide by position relative to the folds x = +-1
    const double hi = std::max(a.x, b.x), lo = std::min(a.x, b.x);
    if (hi > 1.0 && lo < -1.0) return OscSize::large;
    if (hi < 1.0 || lo > -1.0) return OscSize::small; // stays on one side of a fold pair
    return OscSize::ambiguous;
}

} // namespace

std::vector<double> poincare_sequence(const Trajectory& tr, double level) {
    const auto pts = section_states(tr, level);
    if (pts.empty()) throw empty_section("no crossings of the Poincare section");
    std::vector<double> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(p.xd);
    return out;
}

double divergence_rate(const SystemParams& p, const SolverConfig& cfg, int min_renorms) {
    p.validate();
    if (!(p.epsilon > 0.0)) throw invalid_input("divergence_rate needs epsilon > 0");
    const double tau = p.tau;
    double h_max = cfg.h_max > 0.0 ? cfg.h_max : std::min(tau / 20.0, 1e-2);
    const int m = std::max(4, static_cast<int>(std::ceil(tau / h_max - 1e-12)));
    const double h = tau / m;
    const double t_discard =
        cfg.T_discard >= 0.0 ? cfg.T_discard : std::max(50.0 / p.epsilon, 10.0 * tau);
    const double T = std::max(cfg.T, t_discard + (min_renorms + 2) * tau);
    const double d0 = 1e-8;

    // ring buffers over one delay segment (m + 1 nodes) for both trajectories
    const int R = m + 1;
    std::vector<double> x(R), y(R), dx(R), dy(R), u(R), v(R), du(R), dv(R);
    State c{0.0, 0.0};
    if (std::holds_alternative<State>(cfg.history)) c = std::get<State>(cfg.history);
    for (int i = 0; i < R; ++i) {
        x[i] = c.x;
        y[i] = c.y;
        dx[i] = dy[i] = 0.0;
        u[i] = c.x + d0;
        v[i] = c.y;
        du[i] = dv[i] = 0.0;
    }
    auto rhs = [&p](double xi, double yi, double xd, double& ox, double& oy) {
        ox = xi - xi * xi * xi / 3.0 + yi + p.J * (xi - xd);
        oy = p.epsilon * (p.a + p.b * xi + p.gamma * yi);
    };
    rhs(x[m], y[m], x[0], dx[m], dy[m]);
    rhs(u[m], v[m], u[0], du[m], dv[m]);

    auto herm = [&](const std::vector<double>& X, const std::vector<double>& DX, int ia, int ib) {
        const double s = 0.5, s2 = 0.25, s3 = 0.125;
        return (2 * s3 - 3 * s2 + 1) * X[ia] + (s3 - 2 * s2 + s) * h * DX[ia] +
               (-2 * s3 + 3 * s2) * X[ib] + (s3 - s2) * h * DX[ib];
    };

    const auto n_steps = static_cast<std::size_t>(std::ceil(T / h));
    double logsum = 0.0;
    int count = 0;
    int head = m; // ring index of the newest node
    for (std::size_t step = 0; step < n_steps; ++step) {
        const int jd = (head + 1) % R;  // node at t - tau; also the slot to overwrite
        const int jd1 = (head + 2) % R; // node at t - tau + h (distinct: m >= 4)
        for (int sys = 0; sys < 2; ++sys) {
            auto& X = sys ? u : x;
            auto& Y = sys ? v : y;
            auto& DX = sys ? du : dx;
            auto& DY = sys ? dv : dy;
            const double xd0 = X[jd];
            const double xd1 = X[jd1];
            const double xdh = herm(X, DX, jd, jd1);
            double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
            rhs(X[head], Y[head], xd0, k1x, k1y);
            rhs(X[head] + 0.5 * h * k1x, Y[head] + 0.5 * h * k1y, xdh, k2x, k2y);
            rhs(X[head] + 0.5 * h * k2x, Y[head] + 0.5 * h * k2y, xdh, k3x, k3y);
            rhs(X[head] + h * k3x, Y[head] + h * k3y, xd1, k4x, k4y);
            const double xn = X[head] + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
            const double yn = Y[head] + h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
            if (std::abs(xn) > kBlowupBound || std::abs(yn) > kBlowupBound)
                throw blowup_error((static_cast<double>(step) + 1) * h);
            double dn_x, dn_y;
            rhs(xn, yn, xd1, dn_x, dn_y);
            X[jd] = xn; // delayed values were read above; safe to overwrite
            Y[jd] = yn;
            DX[jd] = dn_x;
            DY[jd] = dn_y;
        }
        head = jd;
        if ((step + 1) % static_cast<std::size_t>(m) == 0) {
            const double t = (static_cast<double>(step) + 1) * h;
            double d = 0.0;
            for (int i = 0; i < R; ++i)
                d = std::max({d, std::abs(u[i] - x[i]), std::abs(v[i] - y[i])});
            if (d > 0.0) {
                if (t > t_discard) {
                    logsum += std::log(d / d0);
                    ++count;
                }
                const double s = d0 / d;
                for (int i = 0; i < R; ++i) {
                    u[i] = x[i] + s * (u[i] - x[i]);
                    v[i] = y[i] + s * (v[i] - y[i]);
                    du[i] = dx[i] + s * (du[i] - dx[i]);
                    dv[i] = dy[i] + s * (dv[i] - dy[i]);
                }
            }
        }
    }
    if (count < min_renorms) throw non_convergent("divergence_rate: too few renormalizations");
    return logsum / (count * tau);
}

RegimeLabel classify(const SystemParams& p, const SolverConfig& cfg, const ClassifyConfig& cc) {
    if (!(p.epsilon > 0.0)) throw invalid_input("classify needs epsilon > 0");
    const auto tr = integrate(p, cfg); // blow-up propagates
    const double t0 = tr.t_discard();

    RegimeLabel out;
    auto& st = out.stats;

    const auto ext_all = extract_extrema(tr, t0);
    const auto ext = significant_extrema(ext_all, cc.small_amp_lo);

    // window amplitude
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    {
        const auto& x = tr.x();
        const auto& y = tr.y();
        const auto i0 = static_cast<std::size_t>((t0 - tr.t_begin()) / tr.h());
        for (std::size_t i = i0; i < x.size(); ++i) {
            xmin = std::min(xmin, x[i]);
            xmax = std::max(xmax, x[i]);
            ymin = std::min(ymin, y[i]);
            ymax = std::max(ymax, y[i]);
        }
    }
    st.x_amplitude = xmax - xmin;

    if (ext.size() < 2 || st.x_amplitude <= cc.small_amp_lo) {
        out.regime = Regime::stationary;
        st.lambda_hat = divergence_rate(p, cfg);
        return out;
    }

    // oscillation sizes over the analysis window
    int n_large = 0, n_small = 0, n_ambiguous = 0;
    for (std::size_t i = 1; i < ext.size(); ++i) {
        switch (oscillation_size(ext[i - 1], ext[i], cc)) {
            case OscSize::large: ++n_large; break;
            case OscSize::small: ++n_small; break;
            case OscSize::ambiguous: ++n_ambiguous; break;
            case OscSize::below: break;
        }
    }

    // inter-peak intervals (maxima only)
    std::vector<double> peak_t;
    for (const auto& e : ext)
        if (e.maximum) peak_t.push_back(e.t);
    double mean_ip = 0.0;
    if (peak_t.size() > 1) {
        for (std::size_t i = 1; i < peak_t.size(); ++i) mean_ip += peak_t[i] - peak_t[i - 1];
        mean_ip /= static_cast<double>(peak_t.size() - 1);
    }
    st.mean_interpeak = mean_ip;

    // Poincare section at the y mid-range; periodicity from nearest returns
    const double level = 0.5 * (ymin + ymax);
    const auto pts = section_states(tr, level);
    const double tol = cc.period_tol * std::max(st.x_amplitude, 1e-6);
    st.poincare_period = nearest_return_period(pts, tol, cc.max_poincare_period);
    if (st.poincare_period && pts.size() > static_cast<std::size_t>(*st.poincare_period)) {
        const int per = *st.poincare_period;
        st.period = (pts.back().t - pts[pts.size() - 1 - per].t);
    }

    st.lambda_hat = divergence_rate(p, cfg);

    // decaying transient: oscillation amplitudes shrink strongly and the
    // orbit contracts -> stationary
    if (st.lambda_hat < -1e-4 && ext.size() >= 4) {
        const double first = std::abs(ext[1].x - ext[0].x);
        const double last = std::abs(ext.back().x - ext[ext.size() - 2].x);
        if (last < 0.25 * first && last < cc.small_amp_hi) {
            out.regime = Regime::stationary;
            return out;
        }
    }

    // chaos: positive divergence rate and no short Poincare period
    if (st.lambda_hat > cc.chaos_lambda && !st.poincare_period) {
        out.regime = Regime::chaotic;
        st.large_count = n_large;
        st.small_count = n_small;
        return out;
    }

    // bursting: alternation of fast epochs (runs of >= min_burst_peaks LARGE
    // oscillations at inter-peak < fast_interpeak tau) and quiescent epochs
    // (no significant extrema for > quiescent_span tau, y drifting monotonically)
    {
        // peaks participating in a LARGE oscillation
        std::vector<double> large_peak_t;
        for (std::size_t i = 1; i < ext.size(); ++i) {
            if (oscillation_size(ext[i - 1], ext[i], cc) != OscSize::large) continue;
            if (ext[i - 1].maximum) large_peak_t.push_back(ext[i - 1].t);
            if (ext[i].maximum) large_peak_t.push_back(ext[i].t);
        }
        large_peak_t.erase(std::unique(large_peak_t.begin(), large_peak_t.end()),
                           large_peak_t.end());

        int fast_epochs = 0;
        int run = large_peak_t.empty() ? 0 : 1;
        for (std::size_t i = 1; i < large_peak_t.size(); ++i) {
            if (large_peak_t[i] - large_peak_t[i - 1] < cc.fast_interpeak * p.tau) {
                ++run;
            } else {
                if (run >= cc.min_burst_peaks) ++fast_epochs;
                run = 1;
            }
        }
        if (run >= cc.min_burst_peaks) ++fast_epochs;

        int quiescent = 0;
        bool y_monotone = true;
        for (std::size_t i = 1; i < ext.size(); ++i) {
            const double gap = ext[i].t - ext[i - 1].t;
            if (gap <= cc.quiescent_span * p.tau) continue;
            ++quiescent;
            const int nsamp = 8;
            double prev = tr.dense_eval(ext[i - 1].t).y;
            int dir = 0;
            for (int s = 1; s <= nsamp; ++s) {
                const double t = ext[i - 1].t + gap * s / (nsamp + 1.0);
                const double yv = tr.dense_eval(t).y;
                const int d = (yv > prev + 1e-12) ? 1 : ((yv < prev - 1e-12) ? -1 : 0);
                if (d != 0) {
                    if (dir == 0)
                        dir = d;
                    else if (d != dir)
                        y_monotone = false;
                }
                prev = yv;
            }
        }
        if (y_monotone && fast_epochs >= 2 && quiescent >= 2) {
            out.regime = Regime::bursting;
            const int denom = std::max(1, quiescent);
            st.large_count = static_cast<int>(std::lround(double(n_large) / denom));
            st.small_count = static_cast<int>(std::lround(double(n_small) / denom));
            return out;
        }
    }

    if (st.poincare_period) {
        // counts per period from the last full period window
        int large_pp = 0, small_pp = 0, amb_pp = 0;
        if (st.period) {
            const double t_hi = pts.back().t;
            const double t_lo = t_hi - *st.period;
            for (std::size_t i = 1; i < ext.size(); ++i) {
                if (ext[i].t <= t_lo || ext[i].t > t_hi) continue;
                switch (oscillation_size(ext[i - 1], ext[i], cc)) {
                    case OscSize::large: ++large_pp; break;
                    case OscSize::small: ++small_pp; break;
                    case OscSize::ambiguous: ++amb_pp; break;
                    case OscSize::below: break;
                }
            }
        } else {
            large_pp = n_large;
            small_pp = n_small;
            amb_pp = n_ambiguous;
        }
        st.large_count = large_pp;
        st.small_count = small_pp;

        if (amb_pp > large_pp + small_pp) {
            out.regime = Regime::unclassified;
            return out;
        }
        if (large_pp > 0 && small_pp > 0) {
            out.regime = Regime::mmo;
            return out;
        }
        if (large_pp > 0) {
            const double y_exc = ymax - ymin;
            if (mean_ip < cc.fast_interpeak * p.tau && y_exc < cc.spiking_y_excursion)
                out.regime = Regime::fast_spiking;
            else
                out.regime = Regime::relaxation;
            return out;
        }
        if (small_pp > 0) {
            // small cycle around the equilibrium; anything else is unexpected
            const bool around_eq =
                (p.gamma != 0.0 || p.b != -1.0) || (xmin <= p.a && p.a <= xmax);
            out.regime = around_eq ? Regime::small_cycle : Regime::unclassified;
            return out;
        }
        out.regime = Regime::unclassified;
        return out;
    }

    // not periodic, not chaotic: torus-canard-like amplitude modulation?
    if (peak_t.size() > 20 && mean_ip < cc.fast_interpeak * p.tau) {
        std::vector<double> amps;
        for (std::size_t i = 1; i < ext.size(); ++i)
            amps.push_back(std::abs(ext[i].x - ext[i - 1].x));
        double amin = 1e300, amax2 = 0.0, amean = 0.0;
        for (double a : amps) {
            amin = std::min(amin, a);
            amax2 = std::max(amax2, a);
            amean += a;
        }
        amean /= static_cast<double>(amps.size());
        // slow envelope: direction changes of the amplitude series
        int env_turns = 0;
        for (std::size_t i = 2; i < amps.size(); ++i)
            if ((amps[i] - amps[i - 1]) * (amps[i - 1] - amps[i - 2]) < 0.0) ++env_turns;
        const bool slow_envelope = env_turns * 10 < static_cast<int>(amps.size());
        if (amax2 - amin > cc.envelope_variation * amean && slow_envelope) {
            out.regime = Regime::torus_canard_like;
            st.large_count = n_large;
            st.small_count = n_small;
            return out;
        }
    }

    st.large_count = n_large;
    st.small_count = n_small;
    out.regime = Regime::unclassified;
    return out;
}

namespace {

struct FastOutcome {
    FastAttractor attractor;
    double final_x;
    double tail_amplitude;
};

FastOutcome settle_fast(const FastParams& fp, double c, double T, double h_max = 5e-3) {
    SolverConfig cfg;
    cfg.h_max = h_max;
    cfg.T_discard = 0.0;
    cfg.history = State{c, 0.0};
    for (int attempt = 0; attempt < 3; ++attempt) {
        cfg.T = T;
        Trajectory tr = integrate_fast(fp, cfg);
        const double t_tail = std::max(T - std::max(60.0, 10.0 * fp.tau), 0.0);
        const auto& x = tr.x();
        const auto i0 = static_cast<std::size_t>((t_tail - tr.t_begin()) / tr.h());
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = i0; i < x.size(); ++i) {
            lo = std::min(lo, x[i]);
            hi = std::max(hi, x[i]);
        }
        const double amp = hi - lo;
        if (amp > 2.0) return {FastAttractor::cycle, x.back(), amp};
        if (amp < 0.05) {
            const auto roots = critical_roots(fp.y);
            double best = 1e300;
            FastAttractor which = FastAttractor::other;
            for (const auto& r : roots) {
                const double d = std::abs(x.back() - r.x);
                if (d < best) {
                    best = d;
                    which = (r.branch == Branch::lower)
                                ? FastAttractor::fixed_point_lower
                                : (r.branch == Branch::upper || r.branch == Branch::unique)
                                      ? FastAttractor::fixed_point_upper
                                      : FastAttractor::other;
                }
            }
            return {which, x.back(), amp};
        }
        T *= 2.0; // still settling
    }
    return {FastAttractor::other, 0.0, 0.0};
}

// Warm-started continuation of the large stable cycle in tau: constant
// histories can miss its basin close to the fold of cycles, so start where a
// constant history does land on it and walk tau toward the target.
bool stable_cycle_exists(double J, double y, double tau_target) {
    FastParams fp{J, tau_target, y};
    for (double c : {3.5, -3.5})
        if (settle_fast(fp, c, 500.0).attractor == FastAttractor::cycle) return true;

    double tau_start = -1.0;
    for (double dt : {0.05, 0.1, 0.15, 0.2, 0.3, 0.4}) {
        FastParams fs{J, tau_target + dt, y};
        if (settle_fast(fs, 3.5, 500.0).attractor == FastAttractor::cycle) {
            tau_start = fs.tau;
            break;
        }
    }
    if (tau_start < 0.0) return false;

    // hold the tail segment of the previous run as the next initial history
    SolverConfig cfg;
    cfg.h_max = 5e-3;
    cfg.T = 400.0;
    cfg.T_discard = 0.0;
    cfg.history = State{3.5, 0.0};
    double tau = tau_start;
    auto tr = std::make_shared<Trajectory>(integrate_fast(FastParams{J, tau, y}, cfg));
    while (tau > tau_target + 1e-12) {
        tau = std::max(tau_target, tau - 0.01);
        SolverConfig c2 = cfg;
        c2.T = 150.0;
        const double t_end = tr->t_end();
        auto prev = tr;
        c2.history = SampledHistory{[prev, t_end](double s) { return prev->dense_eval(t_end + s); }};
        tr = std::make_shared<Trajectory>(integrate_fast(FastParams{J, tau, y}, c2));
        double lo = 1e300, hi = -1e300;
        const auto i0 = static_cast<std::size_t>((std::max(c2.T - 60.0, 0.0) - tr->t_begin()) / tr->h());
        for (std::size_t i = i0; i < tr->size(); ++i) {
            lo = std::min(lo, tr->x()[i]);
            hi = std::max(hi, tr->x()[i]);
        }
        if (hi - lo < 2.0) return false; // the cycle collapsed before reaching tau_target
    }
    return true;
}

} // namespace

CycleAverage cycle_average(const FastParams& fp, const SolverConfig& cfg) {
    fp.validate();
    double T = cfg.T;
    const double T_max = 8.0 * cfg.T;
    for (;;) {
        SolverConfig c = cfg;
        c.T = T;
        c.T_discard = std::min(cfg.T_discard >= 0 ? cfg.T_discard : 20.0 * fp.tau, 0.8 * T);
        Trajectory tr = integrate_fast(fp, c);
        const double t0 = c.T_discard >= 0 ? c.T_discard : 20.0 * fp.tau;

        // fixed point: negligible tail amplitude
        const auto& x = tr.x();
        const auto i0 = static_cast<std::size_t>((std::max(t0, tr.t_end() - 40.0 * fp.tau) -
                                                  tr.t_begin()) /
                                                 tr.h());
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = i0; i < x.size(); ++i) {
            lo = std::min(lo, x[i]);
            hi = std::max(hi, x[i]);
        }
        if (hi - lo < 1e-7) return {x.back(), CycleAverage::Kind::fixed_point, std::nullopt};

        // periodic orbit via nearest returns of x(t - tau) on the x mid-level section
        EventSpec ev;
        ev.coordinate = EventCoordinate::x;
        ev.level = 0.5 * (lo + hi);
        ev.direction = EventDirection::up;
        const auto crossings = detect_crossings(tr, ev);
        const int n = static_cast<int>(crossings.size());
        if (n >= 6) {
            for (int p = 1; p <= std::min(32, n / 2); ++p) {
                bool ok = true;
                for (int cidx = 0; cidx < std::min(4, n - p - 1) && ok; ++cidx) {
                    const int i = n - 1 - p - cidx;
                    if (std::abs(crossings[i].x_delayed - crossings[i + p].x_delayed) > 1e-6)
                        ok = false;
                }
                if (ok) {
                    const double ta = crossings[n - 1 - p].t, tb = crossings[n - 1].t;
                    // average x over [ta, tb] by exact Hermite segment integrals
                    const double h = tr.h();
                    const auto& dx = tr.dx();
                    auto node_after = static_cast<std::size_t>(
                        std::ceil((ta - tr.t_begin()) / h - 1e-12));
                    auto node_before = static_cast<std::size_t>(
                        std::floor((tb - tr.t_begin()) / h + 1e-12));
                    double integral = 0.0;
                    for (std::size_t i = node_after; i < node_before; ++i)
                        integral += h / 2.0 * (x[i] + x[i + 1]) + h * h / 12.0 * (dx[i] - dx[i + 1]);
                    // partial end segments by fine sampling of the dense output
                    auto partial = [&](double a, double b2) {
                        const int ns = 16;
                        double s = 0.0;
                        for (int k = 0; k < ns; ++k) {
                            const double t1 = a + (b2 - a) * k / ns;
                            const double t2 = a + (b2 - a) * (k + 1) / ns;
                            s += 0.5 * (tr.dense_x(t1) + tr.dense_x(t2)) * (t2 - t1);
                        }
                        return s;
                    };
                    integral += partial(ta, tr.node_time(node_after));
                    integral += partial(tr.node_time(node_before), tb);
                    return {integral / (tb - ta), CycleAverage::Kind::cycle, tb - ta};
                }
            }
        }
        if (T >= T_max) throw non_convergent("cycle_average: no fixed point or periodic orbit");
        T *= 2.0;
    }
}

AugmentedSlowManifold augmented_manifold(double J, double tau, const std::vector<double>& y_grid) {
    AugmentedSlowManifold out;
    out.J = J;
    out.tau = tau;
    for (double y : y_grid) {
        AugmentedPoint pt;
        pt.y = y;
        const auto roots = critical_roots(y);
        for (const auto& r : roots) {
            pt.branch_x.push_back(r.x);
            bool stable = false;
            try {
                const auto rs = fast_roots(r.x, J, tau);
                stable = !rs.empty() && rs.front().value.real() < 0.0;
            } catch (const error&) {
            }
            pt.branch_stable.push_back(stable);
        }
        FastParams fp{J, tau, y};
        SolverConfig cfg;
        cfg.T = 400.0;
        cfg.T_discard = -1.0;
        try {
            // small history near the attracting branch
            const double x_near = (y >= 0.0) ? roots.back().x : roots.front().x;
            cfg.history = State{x_near + 0.01, 0.0};
            const auto cs = cycle_average(fp, cfg);
            pt.m_small = cs.m;
            pt.cycle_small = cs.kind == CycleAverage::Kind::cycle;
        } catch (const error&) {
            pt.converged = false;
        }
        try {
            cfg.history = State{3.0, 0.0};
            const auto cl = cycle_average(fp, cfg);
            pt.m_large = cl.m;
            pt.cycle_large = cl.kind == CycleAverage::Kind::cycle;
        } catch (const error&) {
            pt.converged = false;
        }
        out.points.push_back(std::move(pt));
    }
    return out;
}

Regime AugmentedSlowManifold::predict(double a) const {
    // stationary: the line x = a meets a stable branch of fixed points
    const double y_a = a * a * a / 3.0 - a;
    double best = 1e300;
    bool stable_fp = false;
    for (const auto& pt : points) {
        for (std::size_t b = 0; b < pt.branch_x.size(); ++b) {
            const double d = std::abs(pt.y - y_a) + std::abs(pt.branch_x[b] - a);
            if (d < best) {
                best = d;
                stable_fp = pt.branch_stable[b];
            }
        }
    }
    if (best < 0.2 && stable_fp) return Regime::stationary;

    // fast spiking: the line x = a crosses the stable cycle-average branch
    for (std::size_t i = 1; i < points.size(); ++i) {
        const auto& p0 = points[i - 1];
        const auto& p1 = points[i];
        if (p0.cycle_large && p1.cycle_large && p0.m_large && p1.m_large &&
            (*p0.m_large - a) * (*p1.m_large - a) <= 0.0)
            return Regime::fast_spiking;
    }
    return Regime::bursting;
}

double flc_locate(double J, double tau, double y_tol) {
    FastParams fp{J, tau, 0.0};
    if (settle_fast(fp, 3.0, 600.0).attractor != FastAttractor::cycle)
        throw no_cycle_at_start("no stable large cycle at y = 0");
    double lo = 0.0;
    double hi = (2.0 / 3.0) * (J - 1.0) * std::sqrt(1.0 + 2.0 * J) + 0.2;
    fp.y = hi;
    if (settle_fast(fp, 3.0, 600.0).attractor == FastAttractor::cycle) hi += 1.0;
    while (hi - lo > y_tol) {
        fp.y = 0.5 * (lo + hi);
        if (settle_fast(fp, 3.0, 600.0).attractor == FastAttractor::cycle)
            lo = fp.y;
        else
            hi = fp.y;
    }
    return 0.5 * (lo + hi);
}

BasinInterval unstable_cycle_bracket(const FastParams& fp) {
    const auto roots = critical_roots(fp.y);
    if (roots.size() < 3) throw not_bistable("need three fixed points");
    const double x_saddle = roots[1].x;
    // the stable focus: prefer the upper branch, else the lower
    double x_pt = roots[2].x;
    FastAttractor target = FastAttractor::fixed_point_upper;
    {
        const auto rs = fast_roots(x_pt, fp.J, fp.tau);
        if (rs.empty() || rs.front().value.real() >= 0.0) {
            x_pt = roots[0].x;
            target = FastAttractor::fixed_point_lower;
            const auto rs2 = fast_roots(x_pt, fp.J, fp.tau);
            if (rs2.empty() || rs2.front().value.real() >= 0.0)
                throw not_bistable("no stable fixed point");
        }
    }
    if (!stable_cycle_exists(fp.J, fp.y, fp.tau))
        throw not_bistable("no coexisting stable cycle");
    if (settle_fast(fp, x_pt, 600.0).attractor != target)
        throw not_bistable("stable point did not attract its own level");

    // The basin's slice along the constant-history diagonal can be a union of
    // intervals; report the connected component containing the stable point.
    // Scan outward for the first outcome change, then bisect that bracket.
    auto edge = [&](double direction, double limit) -> std::pair<double, double> {
        const double step = 0.05 * direction;
        double in = x_pt;
        double probe = x_pt + step;
        bool found = false;
        while ((direction > 0.0 && probe <= limit) || (direction < 0.0 && probe >= limit)) {
            if (settle_fast(fp, probe, 600.0).attractor != target) {
                found = true;
                break;
            }
            in = probe;
            probe += step;
        }
        if (!found) return {limit, limit}; // basin reaches the scan limit (degenerate edge)
        double outv = probe;
        while (std::abs(outv - in) > 1e-4) {
            const double mid = 0.5 * (in + outv);
            if (settle_fast(fp, mid, 600.0).attractor == target)
                in = mid;
            else
                outv = mid;
        }
        return {in, outv};
    };

    const double away = (target == FastAttractor::fixed_point_upper) ? 3.5 : -3.5;
    const double toward_saddle = x_saddle + 1e-3 * (x_pt - x_saddle);
    const auto outer = edge(away > x_pt ? 1.0 : -1.0, away);
    const auto inner = edge(away > x_pt ? -1.0 : 1.0, toward_saddle);

    BasinInterval bi{};
    if (target == FastAttractor::fixed_point_upper) {
        bi.upper_inner = outer.first;
        bi.upper_outer = outer.second;
        bi.lower_inner = inner.first;
        bi.lower_outer = inner.second;
    } else {
        bi.lower_inner = outer.first;
        bi.lower_outer = outer.second;
        bi.upper_inner = inner.first;
        bi.upper_outer = inner.second;
    }
    return bi;
}

std::vector<HomoclinicEstimate> homoclinic_proxy(double J, double y, double tau_lo, double tau_hi,
                                                 double tau_tol) {
    if (!(std::abs(y) < 2.0 / 3.0)) throw domain_error("homoclinic_proxy needs |y| < 2/3");
    if (tau_lo <= 0.0) tau_lo = 1.0 / J + 0.005;
    if (tau_hi <= 0.0) tau_hi = 1.0 / J + 0.45;
    const auto roots = critical_roots(y);
    const double x_saddle = roots[1].x;
    // probe just below the saddle (on the lower-branch side)
    const double c = x_saddle - 0.05 * (x_saddle - roots[0].x);

    auto outcome = [&](double tau) {
        FastParams fp{J, tau, y};
        return settle_fast(fp, c, 900.0).attractor;
    };

    std::vector<HomoclinicEstimate> out;
    const double step = 0.004;
    double t_prev = tau_lo;
    FastAttractor prev = outcome(t_prev);
    for (double t = tau_lo + step; t <= tau_hi + 1e-12; t += step) {
        const FastAttractor cur = outcome(t);
        if (cur != prev) {
            double lo = t_prev, hi = t;
            while (hi - lo > tau_tol) {
                const double mid = 0.5 * (lo + hi);
                if (outcome(mid) == prev)
                    lo = mid;
                else
                    hi = mid;
            }
            HomoclinicEstimate est;
            est.tau = 0.5 * (lo + hi);
            est.kind = (cur == FastAttractor::cycle || prev == FastAttractor::cycle)
                           ? HomoclinicKind::point_to_cycle
                           : HomoclinicKind::point_to_point;
            out.push_back(est);
        }
        t_prev = t;
        prev = cur;
    }
    return out;
}

std::vector<PortraitCurve> portrait(const FastParams& fp, const std::vector<HistoryInit>& histories,
                                    const SolverConfig& cfg) {
    std::vector<PortraitCurve> out;
    for (const auto& hinit : histories) {
        SolverConfig c = cfg;
        c.history = hinit;
        const Trajectory tr = integrate_fast(fp, c);
        PortraitCurve pc;
        const double t0 = std::max(tr.t_discard(), 0.0);
        const auto i0 = static_cast<std::size_t>(std::ceil((t0 - tr.t_begin()) / tr.h()));
        for (std::size_t i = std::max<std::size_t>(i0, tr.m()); i < tr.size(); ++i) {
            pc.x.push_back(tr.x()[i]);
            pc.x_delayed.push_back(tr.x()[i - tr.m()]);
        }
        out.push_back(std::move(pc));
    }
    return out;
}

std::vector<AtlasEntry> atlas_sweep(const std::vector<SystemParams>& grid,
                                    const SolverConfig& cfg, const ClassifyConfig& cc,
                                    int workers) {
    std::vector<AtlasEntry> out(grid.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            out[i].params = grid[i];
            try {
                out[i].label = classify(grid[i], cfg, cc);
            } catch (const std::exception& e) {
                out[i].error = e.what();
            }
        }
    };
    workers = std::max(1, workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return out;
}

} // namespace dfhn
