#pragma once

#include <cstdint>
#include <vector>

#include "dfhn/core.hpp"

namespace dfhn {

struct NetworkConfig {
    double h_max = 0.0;  // <= 0: default tau/1000
    double T = 100.0;
};

struct NetworkResult {
    int N = 0;
    double h = 0.0;
    int m = 0;                               // steps per delay
    std::vector<double> t;                   // from -tau
    std::vector<std::vector<double>> x;      // [unit][node]
    std::vector<std::vector<double>> y;
};

/// Euler-Maruyama for the N-unit gap-junction network
///   dx_i = (x_i - x_i^3/3 + y_i + J(x_i - mean_j x_j(t - tau))) dt + sigma dW_i
///   dy_i = eps (a + b x_i + gamma y_i) dt
/// with step h | tau, so the delayed mean lands on stored steps exactly.
/// Noise increments are generated counter-based from (seed, unit, step), so
/// results do not depend on evaluation order.
NetworkResult simulate_network(int N, const SystemParams& p, double sigma, std::uint64_t seed,
                               const NetworkConfig& cfg, const State& history);

} // namespace dfhn
