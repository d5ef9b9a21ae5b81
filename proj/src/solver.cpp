#include "dfhn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace dfhn {

namespace {

double hermite(double s, double h, double xa, double xb, double da, double db) {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * xa + (s3 - 2 * s2 + s) * h * da +
           (-2 * s3 + 3 * s2) * xb + (s3 - s2) * h * db;
}

int choose_m(double tau, double h_max) {
    if (h_max <= 0.0) h_max = std::min(tau / 20.0, 1e-2);
    int m = static_cast<int>(std::ceil(tau / h_max - 1e-12));
    return std::max(m, 4);
}

} // namespace

Trajectory::Trajectory(double tau, int m, bool fast, double frozen_y, double t_discard)
    : tau_(tau), h_(tau / m), m_(m), fast_(fast), frozen_y_(frozen_y), t_discard_(t_discard) {}

void Trajectory::push_node(double x, double y, double dx, double dy) {
    x_.push_back(x);
    y_.push_back(y);
    dx_.push_back(dx);
    dy_.push_back(dy);
}

void Trajectory::set_node(std::size_t i, double x, double y, double dx, double dy) {
    x_[i] = x;
    y_[i] = y;
    dx_[i] = dx;
    dy_[i] = dy;
}

void Trajectory::reserve_total(std::size_t n) {
    x_.reserve(n);
    y_.reserve(n);
    dx_.reserve(n);
    dy_.reserve(n);
}

std::size_t Trajectory::segment_of(double t) const {
    const double lo = t_begin(), hi = t_end();
    if (!(t >= lo - 1e-12 * std::max(1.0, std::abs(lo)) &&
          t <= hi + 1e-12 * std::max(1.0, std::abs(hi))))
        throw out_of_range_error("dense_eval outside trajectory range");
    double u = (t - lo) / h_;
    auto i = static_cast<std::ptrdiff_t>(std::floor(u));
    i = std::clamp<std::ptrdiff_t>(i, 0, static_cast<std::ptrdiff_t>(size()) - 2);
    return static_cast<std::size_t>(i);
}

State Trajectory::dense_eval(double t) const {
    const std::size_t i = segment_of(t);
    const double t0 = node_time(i);
    const double s = (t - t0) / h_;
    if (s == 0.0) return {x_[i], fast_ ? frozen_y_ : y_[i]};
    State out;
    out.x = hermite(s, h_, x_[i], x_[i + 1], dx_[i], dx_[i + 1]);
    out.y = fast_ ? frozen_y_ : hermite(s, h_, y_[i], y_[i + 1], dy_[i], dy_[i + 1]);
    return out;
}

double Trajectory::dense_x(double t) const {
    const std::size_t i = segment_of(t);
    const double s = (t - node_time(i)) / h_;
    if (s == 0.0) return x_[i];
    return hermite(s, h_, x_[i], x_[i + 1], dx_[i], dx_[i + 1]);
}

double Trajectory::x_delayed(double t) const { return dense_x(t - tau_); }

void Trajectory::write_csv(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw error("cannot open " + path);
    f << "t,x,y,x_delayed\n";
    char buf[160];
    for (std::size_t i = 0; i < size(); ++i) {
        const double t = node_time(i);
        const double xd = (i >= static_cast<std::size_t>(m_)) ? x_[i - m_] : std::nan("");
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", t, x_[i],
                      fast_ ? frozen_y_ : y_[i], xd);
        f << buf;
    }
}

namespace {

// Shared method-of-steps RK4 loop; rhs(x, y, x_delayed) -> Deriv.
template <class Rhs>
Trajectory run_integration(double tau, const SolverConfig& cfg, bool fast, double frozen_y,
                           double default_discard, Rhs rhs) {
    cfg.validate();
    const int m = choose_m(tau, cfg.h_max);
    const double h = tau / m;
    const double t_discard = cfg.T_discard >= 0.0 ? cfg.T_discard : default_discard;
    if (t_discard >= cfg.T) throw invalid_config("transient discard longer than T");

    Trajectory tr(tau, m, fast, frozen_y, t_discard);
    const auto n_steps = static_cast<std::size_t>(std::ceil(cfg.T / h - 1e-12));
    tr.reserve_total(m + n_steps + 1);

    if (std::holds_alternative<State>(cfg.history)) {
        const State c = std::get<State>(cfg.history);
        for (int i = 0; i <= m; ++i) tr.push_node(c.x, fast ? frozen_y : c.y, 0.0, 0.0);
    } else {
        const auto& sh = std::get<SampledHistory>(cfg.history);
        if (!sh.value) throw invalid_config("sampled history without value function");
        const double dfd = 1e-4 * h;
        for (int i = 0; i <= m; ++i) {
            const double t = (static_cast<double>(i) - m) * h;
            const State v = sh.value(t);
            State d;
            if (sh.derivative) {
                d = sh.derivative(t);
            } else {
                const double tl = std::max(t - dfd, -tau), th = std::min(t + dfd, 0.0);
                const State a = sh.value(tl), b = sh.value(th);
                d.x = (b.x - a.x) / (th - tl);
                d.y = (b.y - a.y) / (th - tl);
            }
            tr.push_node(v.x, fast ? frozen_y : v.y, d.x, fast ? 0.0 : d.y);
        }
    }

    const auto& x = tr.x();
    const auto& y = tr.y();
    const auto& dx = tr.dx();

    { // derivative at t = 0 comes from the RHS (history junction)
        const auto d = rhs(x[m], y[m], x[0]);
        tr.set_node(m, x[m], y[m], d.dx, d.dy);
    }

    for (std::size_t step = 0; step < n_steps; ++step) {
        const std::size_t i = m + step;
        const std::size_t j = i - m; // node at t - tau
        const double xd0 = x[j];
        const double xd1 = x[j + 1];
        const double xdh = hermite(0.5, h, x[j], x[j + 1], dx[j], dx[j + 1]);

        const auto k1 = rhs(x[i], y[i], xd0);
        const auto k2 = rhs(x[i] + 0.5 * h * k1.dx, y[i] + 0.5 * h * k1.dy, xdh);
        const auto k3 = rhs(x[i] + 0.5 * h * k2.dx, y[i] + 0.5 * h * k2.dy, xdh);
        const auto k4 = rhs(x[i] + h * k3.dx, y[i] + h * k3.dy, xd1);

        const double xn = x[i] + h / 6.0 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
        const double yn = y[i] + h / 6.0 * (k1.dy + 2 * k2.dy + 2 * k3.dy + k4.dy);
        if (std::abs(xn) > kBlowupBound || std::abs(yn) > kBlowupBound)
            throw blowup_error((static_cast<double>(step) + 1) * h);
        const auto dn = rhs(xn, yn, xd1);
        tr.push_node(xn, yn, dn.dx, dn.dy);
    }
    return tr;
}

} // namespace

Trajectory integrate(const SystemParams& p, const SolverConfig& cfg) {
    p.validate();
    const double default_discard =
        p.epsilon > 0.0 ? std::max(50.0 / p.epsilon, 10.0 * p.tau) : 20.0 * p.tau;
    return run_integration(p.tau, cfg, false, 0.0, default_discard,
                           [&p](double xi, double yi, double xd) {
                               Deriv d;
                               d.dx = xi - xi * xi * xi / 3.0 + yi + p.J * (xi - xd);
                               d.dy = p.epsilon * (p.a + p.b * xi + p.gamma * yi);
                               return d;
                           });
}

Trajectory integrate_fast(const FastParams& fp, const SolverConfig& cfg) {
    fp.validate();
    return run_integration(fp.tau, cfg, true, fp.y, 20.0 * fp.tau,
                           [&fp](double xi, double, double xd) {
                               Deriv d;
                               d.dx = xi - xi * xi * xi / 3.0 + fp.y + fp.J * (xi - xd);
                               d.dy = 0.0;
                               return d;
                           });
}

namespace {

double coord_eval(const Trajectory& tr, EventCoordinate c, double t) {
    switch (c) {
        case EventCoordinate::x: return tr.dense_x(t);
        case EventCoordinate::y: return tr.dense_eval(t).y;
        case EventCoordinate::x_delayed: return tr.x_delayed(t);
    }
    return 0.0;
}

} // namespace

std::vector<Crossing> detect_crossings(const Trajectory& tr, const EventSpec& ev) {
    ev.validate();
    std::vector<Crossing> out;
    const double t_min = std::max(tr.t_discard(),
                                  ev.coordinate == EventCoordinate::x_delayed ? 0.0 : tr.t_begin());
    if (t_min >= tr.t_end()) return out;
    auto i_first = static_cast<std::size_t>(
        std::max(0.0, std::ceil((t_min - tr.t_begin()) / tr.h() - 1e-9)));
    for (std::size_t i = i_first; i + 1 < tr.size(); ++i) {
        const double ta = tr.node_time(i), tb = tr.node_time(i + 1);
        const double fa = coord_eval(tr, ev.coordinate, ta) - ev.level;
        const double fb = coord_eval(tr, ev.coordinate, tb) - ev.level;
        if (fa == 0.0) {
            const bool up = fb > 0.0, down = fb < 0.0;
            if (ta >= t_min &&
                ((ev.direction == EventDirection::up && up) ||
                 (ev.direction == EventDirection::down && down) ||
                 (ev.direction == EventDirection::both && (up || down))))
                out.push_back({ta, tr.dense_eval(ta), tr.x_delayed(std::max(ta, 0.0))});
            continue;
        }
        if (fa * fb >= 0.0) continue;
        const bool up = fb > 0.0;
        if ((ev.direction == EventDirection::up && !up) ||
            (ev.direction == EventDirection::down && up))
            continue;
        double lo = ta, hi = tb, flo = fa;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = coord_eval(tr, ev.coordinate, mid) - ev.level;
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((flo < 0.0) == (fm < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
            if (hi - lo <= 1e-10 * std::max(1.0, std::abs(mid))) break;
        }
        const double tc = 0.5 * (lo + hi);
        if (tc < t_min) continue;
        out.push_back({tc, tr.dense_eval(tc), tr.x_delayed(std::max(tc, 0.0))});
    }
    return out;
}

} // namespace dfhn
