#include "dfhn/lambert.hpp"

#include <cmath>

namespace dfhn {

namespace {

using cplx = std::complex<double>;
constexpr double kTwoPi = 6.283185307179586476925286766559;
const double kInvE = std::exp(-1.0);

cplx halley(cplx w, cplx z) {
    for (int it = 0; it < 100; ++it) {
        const cplx ew = std::exp(w);
        const cplx f = w * ew - z;
        if (std::abs(f) <= 1e-13 * std::max(1e-300, std::abs(z))) break;
        const cplx wp1 = w + 1.0;
        const cplx denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const cplx step = f / denom;
        w -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(w))) break;
    }
    return w;
}

// seed near the branch point z = -1/e for k in {0, -1}
cplx branch_point_seed(int k, cplx z) {
    cplx p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
    if (k == -1) p = -p;
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
}

} // namespace

cplx lambert_w(int k, cplx z) {
    if (z == 0.0) {
        if (k == 0) return 0.0;
        throw branch_domain_error("W_k(0) undefined for k != 0");
    }
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw branch_domain_error("lambert_w: non-finite argument");

    const bool real_axis = (z.imag() == 0.0);
    const double zr = z.real();

    // real-valued specializations keep the imaginary part exactly zero
    if (real_axis && k == 0 && zr >= -kInvE) {
        double w;
        if (std::abs(zr) < 0.25) {
            w = zr * (1.0 - zr + 1.5 * zr * zr);
        } else if (zr < 0.0) {
            w = branch_point_seed(0, z).real();
        } else {
            const double l1 = std::log(zr < 3.0 ? zr + 1.0 : zr);
            w = zr < 3.0 ? 0.5 * l1 : l1 - std::log(l1);
        }
        for (int it = 0; it < 100; ++it) {
            const double ew = std::exp(w);
            const double f = w * ew - zr;
            if (std::abs(f) <= 1e-13 * std::max(1e-300, std::abs(zr))) break;
            const double wp1 = w + 1.0;
            w -= f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        }
        return {w, 0.0};
    }
    if (real_axis && k == -1 && zr >= -kInvE && zr < 0.0) {
        double w = (zr > -0.25) ? std::log(-zr) - std::log(-std::log(-zr))
                                : branch_point_seed(-1, z).real();
        for (int it = 0; it < 100; ++it) {
            const double ew = std::exp(w);
            const double f = w * ew - zr;
            if (std::abs(f) <= 1e-13 * std::abs(zr)) break;
            const double wp1 = w + 1.0;
            w -= f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        }
        return {w, 0.0};
    }

    cplx w;
    const double near_bp = std::abs(z + kInvE);
    if ((k == 0 || k == -1) && near_bp < 0.3) {
        w = halley(branch_point_seed(k, z), z);
    } else if (k == 0) {
        w = (std::abs(z) < 0.5) ? z * (1.0 - z + 1.5 * z * z) : std::log(1.0 + z);
        w = halley(w, z);
    } else {
        // Branch-stable fixed-point iteration w <- L1 - Log w with
        // L1 = Log z + 2 pi i k: W_k satisfies it exactly for k != 0, and
        // |W_k| >= pi makes the map a contraction, so the branch cannot drift.
        const cplx L1 = std::log(z) + cplx(0.0, kTwoPi * k);
        w = L1 - std::log(L1);
        for (int it = 0; it < 80; ++it) {
            const cplx wn = L1 - std::log(w);
            const bool done = std::abs(wn - w) < 1e-13 * std::max(1.0, std::abs(wn));
            w = wn;
            if (done) break;
        }
        w = halley(w, z);
    }
    if (std::abs(w * std::exp(w) - z) > 1e-10 * std::max(1.0, std::abs(z)))
        throw no_convergence("lambert_w failed to converge");
    return w;
}

} // namespace dfhn
