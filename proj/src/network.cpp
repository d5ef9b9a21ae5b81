#include "dfhn/network.hpp"

#include <cmath>

#include "dfhn/errors.hpp"
#include "dfhn/solver.hpp"

namespace dfhn {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// standard normal keyed by (seed, unit, step): Box-Muller on two counter draws
double gauss(std::uint64_t seed, std::uint64_t unit, std::uint64_t step) {
    const std::uint64_t k = splitmix64(seed ^ splitmix64(unit * 0x9e3779b97f4a7c15ULL + step));
    const std::uint64_t k2 = splitmix64(k);
    const double u1 = (static_cast<double>(k >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = (static_cast<double>(k2 >> 11) + 0.5) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

} // namespace

NetworkResult simulate_network(int N, const SystemParams& p, double sigma, std::uint64_t seed,
                               const NetworkConfig& cfg, const State& history) {
    p.validate();
    if (N < 1) throw invalid_config("N must be >= 1");
    if (sigma < 0.0) throw invalid_config("sigma must be >= 0");

    const double h_max = cfg.h_max > 0.0 ? cfg.h_max : p.tau / 1000.0;
    const int m = std::max(4, static_cast<int>(std::ceil(p.tau / h_max - 1e-12)));
    const double h = p.tau / m;
    const auto n_steps = static_cast<std::size_t>(std::ceil(cfg.T / h - 1e-12));
    const double sqh = std::sqrt(h);

    NetworkResult res;
    res.N = N;
    res.h = h;
    res.m = m;
    res.x.assign(N, {});
    res.y.assign(N, {});
    for (int i = 0; i < N; ++i) {
        res.x[i].assign(m + 1, history.x);
        res.y[i].assign(m + 1, history.y);
        res.x[i].reserve(m + n_steps + 1);
        res.y[i].reserve(m + n_steps + 1);
    }
    std::vector<double> mean_delayed(m + n_steps + 1, history.x);

    for (std::size_t step = 0; step < n_steps; ++step) {
        const std::size_t i = m + step;
        const double xd_mean = mean_delayed[i - m];
        double msum = 0.0;
        for (int u = 0; u < N; ++u) {
            const double xi = res.x[u][i];
            const double yi = res.y[u][i];
            double xn = xi + h * (xi - xi * xi * xi / 3.0 + yi + p.J * (xi - xd_mean));
            if (sigma > 0.0) xn += sigma * sqh * gauss(seed, u, step);
            const double yn = yi + h * p.epsilon * (p.a + p.b * xi + p.gamma * yi);
            if (std::abs(xn) > kBlowupBound || std::abs(yn) > kBlowupBound)
                throw blowup_error((static_cast<double>(step) + 1) * h);
            res.x[u].push_back(xn);
            res.y[u].push_back(yn);
            msum += xn;
        }
        mean_delayed[i + 1] = msum / N;
    }

    res.t.resize(m + n_steps + 1);
    for (std::size_t i = 0; i < res.t.size(); ++i)
        res.t[i] = (static_cast<double>(i) - m) * h;
    return res;
}

} // namespace dfhn
