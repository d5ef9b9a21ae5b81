#include "dfhn/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "dfhn/lambert.hpp"

namespace dfhn {

cplx char_fn_fast(cplx xi, double x_star, double J, double tau) {
    return xi - (1.0 - x_star * x_star + J) + J * std::exp(-xi * tau);
}

cplx char_fn_fast_d(cplx xi, double /*x_star*/, double J, double tau) {
    return 1.0 - J * tau * std::exp(-xi * tau);
}

cplx char_fn_full(cplx xi, double a, double J, double tau, double epsilon) {
    return xi * (xi - 1.0 + a * a - J * (1.0 - std::exp(-xi * tau))) + epsilon;
}

cplx char_fn_full_d(cplx xi, double a, double J, double tau, double epsilon) {
    (void)epsilon;
    const cplx e = std::exp(-xi * tau);
    return 2.0 * xi - (1.0 - a * a + J) + J * e * (1.0 - xi * tau);
}

cplx char_fn_general(cplx xi, double x_star, double J, double tau, double epsilon, double gamma) {
    const double B = 1.0 - x_star * x_star + J;
    return (J * xi - gamma * epsilon * J) * std::exp(-xi * tau) + xi * xi -
           xi * (B + gamma * epsilon) + epsilon * (gamma * B + 1.0);
}

cplx char_fn_general_d(cplx xi, double x_star, double J, double tau, double epsilon, double gamma) {
    const double B = 1.0 - x_star * x_star + J;
    const cplx e = std::exp(-xi * tau);
    return J * e - tau * (J * xi - gamma * epsilon * J) * e + 2.0 * xi - (B + gamma * epsilon);
}

namespace {

template <class F, class Fd>
cplx newton_polish(cplx xi, F f, Fd fd, int iters = 30) {
    for (int i = 0; i < iters; ++i) {
        const cplx v = f(xi);
        if (std::abs(v) < 1e-15 * std::max(1.0, std::abs(xi))) break;
        const cplx d = fd(xi);
        if (std::abs(d) == 0.0) break;
        const cplx step = v / d;
        xi -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(xi))) break;
    }
    return xi;
}

} // namespace

std::vector<CharacteristicRoot> fast_roots(double x_star, double J, double tau, int K) {
    if (!(tau > 0.0)) throw invalid_input("fast_roots: tau must be positive");
    const double A = 1.0 - x_star * x_star + J;
    const cplx arg = -tau * J * std::exp(-tau * A);
    auto f = [&](cplx xi) { return char_fn_fast(xi, x_star, J, tau); };
    auto fd = [&](cplx xi) { return char_fn_fast_d(xi, x_star, J, tau); };

    std::vector<CharacteristicRoot> out;
    for (int k = -K; k <= K; ++k) {
        cplx w;
        try {
            w = lambert_w(k, arg);
        } catch (const branch_domain_error&) {
            continue;
        }
        cplx xi = A + w / tau;
        xi = newton_polish(xi, f, fd);
        if (xi.imag() < -1e-9) continue; // keep upper-half representatives and real roots
        const double res = std::abs(f(xi));
        if (res > 1e-10 * std::max(1.0, std::abs(xi)))
            throw no_convergence("fast_roots: residual too large");
        // dedupe (k = 0 / -1 can coincide near the branch point)
        bool dup = false;
        for (const auto& r : out)
            if (std::abs(r.value - xi) < 1e-8 * std::max(1.0, std::abs(xi))) dup = true;
        if (!dup) out.push_back({xi, k, res});
    }
    std::sort(out.begin(), out.end(), [](const CharacteristicRoot& l, const CharacteristicRoot& r) {
        return l.value.real() > r.value.real();
    });
    return out;
}

namespace {

// winding number of f along the rectangle boundary by argument tracking;
// subdivides until each segment turns by < pi/2. Throws contour_on_root if
// |f| becomes negligible on the contour.
template <class F>
int winding_number(F f, double re_lo, double re_hi, double im_lo, double im_hi) {
    struct Pt {
        cplx z;
        cplx fz;
    };
    const cplx corners[5] = {{re_lo, im_lo}, {re_hi, im_lo}, {re_hi, im_hi},
                             {re_lo, im_hi}, {re_lo, im_lo}};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
        const cplx za = corners[e], zb = corners[e + 1];
        // adaptive walk
        std::vector<Pt> stack;
        Pt cur{za, f(za)};
        double t_cur = 0.0;
        double dt = 1.0 / 64.0;
        const double scale = std::abs(cur.fz);
        if (scale < 1e-13) throw contour_on_root("characteristic zero on contour");
        int guard = 0;
        while (t_cur < 1.0) {
            if (++guard > 2000000) throw no_convergence("winding_number: too many segments");
            const double t_next = std::min(1.0, t_cur + dt);
            const cplx zn = za + (zb - za) * t_next;
            const cplx fn = f(zn);
            if (std::abs(fn) < 1e-13) throw contour_on_root("characteristic zero on contour");
            const double dphi = std::arg(fn / cur.fz);
            if (std::abs(dphi) > M_PI / 2.0) {
                if (dt <= 1e-9) throw contour_on_root("unresolvable turn: root on contour");
                dt *= 0.5;
                continue;
            }
            total += dphi;
            cur = {zn, fn};
            t_cur = t_next;
            if (std::abs(dphi) < M_PI / 8.0) dt = std::min(dt * 2.0, 1.0 / 64.0);
        }
    }
    return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

template <class F>
void collect_roots(F f, double re_lo, double re_hi, double im_lo, double im_hi, int count,
                   std::vector<cplx>& centers, int depth = 0) {
    if (count <= 0) return;
    // keep subdividing until the box is small enough that Newton from its
    // center stays in the right basin
    const bool box_small = (re_hi - re_lo) < 0.25 && (im_hi - im_lo) < 0.25;
    const bool box_tiny = (re_hi - re_lo) < 1e-7 && (im_hi - im_lo) < 1e-7;
    if ((count == 1 && box_small) || depth > 60 || box_tiny) {
        centers.push_back({0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)});
        for (int i = 1; i < count; ++i)
            centers.push_back({0.5 * (re_lo + re_hi) + 1e-6 * i, 0.5 * (im_lo + im_hi)});
        return;
    }
    const bool split_re = (re_hi - re_lo) >= (im_hi - im_lo);
    double mid = split_re ? 0.5 * (re_lo + re_hi) : 0.5 * (im_lo + im_hi);
    for (int attempt = 0; attempt < 8; ++attempt) {
        try {
            int c1, c2;
            if (split_re) {
                c1 = winding_number(f, re_lo, mid, im_lo, im_hi);
                c2 = count - c1;
                collect_roots(f, re_lo, mid, im_lo, im_hi, c1, centers, depth + 1);
                collect_roots(f, mid, re_hi, im_lo, im_hi, c2, centers, depth + 1);
            } else {
                c1 = winding_number(f, re_lo, re_hi, im_lo, mid);
                c2 = count - c1;
                collect_roots(f, re_lo, re_hi, im_lo, mid, c1, centers, depth + 1);
                collect_roots(f, re_lo, re_hi, mid, im_hi, c2, centers, depth + 1);
            }
            return;
        } catch (const contour_on_root&) {
            // jitter the cut line away from the root
            mid += (split_re ? (re_hi - re_lo) : (im_hi - im_lo)) * 1.7e-3 * (attempt + 1);
        }
    }
    throw no_convergence("collect_roots: could not isolate roots");
}

} // namespace

StabilityReport full_rightmost_root(double a, double J, double tau, double epsilon) {
    if (!(epsilon > 0.0)) throw invalid_input("full_rightmost_root needs epsilon > 0");
    if (!(tau > 0.0)) throw invalid_input("full_rightmost_root needs tau > 0");
    auto f = [&](cplx xi) { return char_fn_full(xi, a, J, tau, epsilon); };
    auto fd = [&](cplx xi) { return char_fn_full_d(xi, a, J, tau, epsilon); };

    // All roots with Re xi >= -d satisfy |xi| <= |1-a^2| + J(1 + e^(d tau)) + eps + 1.
    double d_left = 0.5;
    int count = 0;
    double re_hi = 0.0, im_hi = 0.0;
    for (int expand = 0;; ++expand) {
        if (expand >= 10) throw no_convergence("full_rightmost_root: no roots found");
        const double bound =
            std::abs(1.0 - a * a) + J * (1.0 + std::exp(d_left * tau)) + epsilon + 1.0;
        re_hi = bound;
        im_hi = bound;
        bool ok = false;
        for (int jit = 0; jit < 6 && !ok; ++jit) {
            const double dj = d_left * (1.0 + 3.1e-3 * jit);
            try {
                count = winding_number(f, -dj, re_hi, -im_hi, im_hi);
                d_left = dj;
                ok = true;
            } catch (const contour_on_root&) {
            }
        }
        if (!ok) throw no_convergence("full_rightmost_root: contour kept hitting roots");
        if (count > 0) break;
        d_left *= 2.0;
    }

    std::vector<cplx> centers;
    collect_roots(f, -d_left, re_hi, -im_hi, im_hi, count, centers);

    std::vector<CharacteristicRoot> roots;
    for (cplx c : centers) {
        const cplx xi = newton_polish(c, f, fd, 80);
        const double res = std::abs(f(xi));
        if (res > 1e-10 * std::max(1.0, std::abs(xi))) continue;
        bool dup = false;
        for (const auto& r : roots)
            if (std::abs(r.value - xi) < 1e-8 * std::max(1.0, std::abs(xi))) dup = true;
        if (!dup && xi.imag() >= -1e-9) roots.push_back({xi, std::nullopt, res});
    }
    if (roots.empty()) throw no_convergence("full_rightmost_root: polish lost all roots");
    std::sort(roots.begin(), roots.end(), [](const CharacteristicRoot& l, const CharacteristicRoot& r) {
        return l.value.real() > r.value.real();
    });

    StabilityReport rep;
    rep.roots_found = roots;
    rep.rightmost_real_part = roots.front().value.real();
    if (rep.rightmost_real_part < -kMarginalTol)
        rep.verdict = Verdict::stable;
    else if (rep.rightmost_real_part > kMarginalTol)
        rep.verdict = Verdict::unstable;
    else
        rep.verdict = Verdict::marginal;
    return rep;
}

void write_roots_csv(const std::string& path, const std::vector<CharacteristicRoot>& roots) {
    std::ofstream fs(path);
    if (!fs) throw error("cannot open " + path);
    fs << "re,im,branch,residual\n";
    char buf[160];
    for (const auto& r : roots) {
        if (r.branch)
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%.3g\n", r.value.real(),
                          r.value.imag(), *r.branch, r.residual);
        else
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g,,%.3g\n", r.value.real(), r.value.imag(),
                          r.residual);
        fs << buf;
    }
}

} // namespace dfhn
