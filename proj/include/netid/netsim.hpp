// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef NETID_NETSIM_HPP
#define NETID_NETSIM_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "netid/errors.hpp"
#include "netid/timeseries.hpp"

namespace netid {

/// Ground-truth network: directed edges carrying strictly-causal FIR
/// filters (h[0] = 0, so x_j(t) depends only on strictly earlier inputs).
struct NetworkSpec {
    int n = 0;
    // (from, to) -> taps h[0..order], h[0] always 0
    std::map<std::pair<int, int>, std::vector<double>> edges;
    std::vector<double> noise_std;
    std::uint64_t seed = 0;

    std::vector<int> in_degree() const {
        std::vector<int> deg(n, 0);
        for (const auto& [key, taps] : edges) ++deg[key.second];
        return deg;
    }
};

struct SimulationResult {
    TimeSeriesSet ts;
    std::vector<double> achieved_snr;        // 0 for nodes with no inbound edge
    std::vector<double> effective_noise_std; // after SNR matching
};

/// Draws a random spec. Exactly one of `in_degree` / `density` selects the
/// edge rule. The in-degree rule draws min(in_degree, j) parents for node j
/// from lower-indexed nodes, which yields an acyclic graph with source
/// nodes; the density rule flips an independent coin per ordered pair and
/// may produce feedback loops. Each edge's taps are uniform draws rescaled
/// so sum|h| = 0.5/max_in_degree, a small-gain margin that keeps the
/// recursion stable.
inline NetworkSpec random_spec(int n, int in_degree, double density, int order, std::uint64_t seed) {
    if (n < 2) throw ConfigError("random_spec: need n >= 2");
    if (order < 1) throw ConfigError("random_spec: need order >= 1");
    if (in_degree >= 0 && in_degree >= n)
        throw ConfigError("random_spec: in-degree " + std::to_string(in_degree) +
                          " must be < n = " + std::to_string(n));
    if ((in_degree >= 0) == (density >= 0.0))
        throw ConfigError("random_spec: specify exactly one of in_degree / density");

    std::mt19937_64 rng(seed);
    NetworkSpec spec;
    spec.n = n;
    spec.seed = seed;
    spec.noise_std.assign(n, 1.0);

    std::vector<std::pair<int, int>> chosen;
    if (in_degree >= 0) {
        for (int j = 0; j < n; ++j) {
            std::vector<int> lower(j);
            std::iota(lower.begin(), lower.end(), 0);
            std::shuffle(lower.begin(), lower.end(), rng);
            const int deg = std::min(in_degree, j);
            for (int e = 0; e < deg; ++e) chosen.emplace_back(lower[e], j);
        }
    } else {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (i != j && coin(rng) < density) chosen.emplace_back(i, j);
    }

    std::vector<int> deg(n, 0);
    for (const auto& [from, to] : chosen) ++deg[to];
    const int max_deg = std::max(1, *std::max_element(deg.begin(), deg.end()));
    const double gain_budget = 0.5 / max_deg;

    std::uniform_real_distribution<double> tap(-1.0, 1.0);
    for (const auto& [from, to] : chosen) {
        std::vector<double> h(order + 1, 0.0);
        double l1 = 0.0;
        while (l1 == 0.0) {
            for (int k = 1; k <= order; ++k) {
                h[k] = tap(rng);
                l1 += std::abs(h[k]);
            }
        }
        for (int k = 1; k <= order; ++k) h[k] *= gain_budget / l1;
        spec.edges[{from, to}] = std::move(h);
    }
    return spec;
}

/// The time recursion x_j(t) = sigma_j u_j(t) + sum_edges sum_k h[k] x_i(t-k)
/// from zero initial history; `unit_noise` is n x total of N(0,1) draws.
inline Eigen::MatrixXd run_recursion(const NetworkSpec& spec, const std::vector<double>& noise_std,
                                     const Eigen::MatrixXd& unit_noise) {
    const int n = spec.n;
    const long total = unit_noise.cols();
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, total);
    for (long t = 0; t < total; ++t) {
        for (int j = 0; j < n; ++j) x(j, t) = noise_std[j] * unit_noise(j, t);
        for (const auto& [key, h] : spec.edges) {
            const auto [from, to] = key;
            double acc = 0.0;
            const long kmax = std::min<long>(static_cast<long>(h.size()) - 1, t);
            for (long k = 1; k <= kmax; ++k) acc += h[k] * x(from, t - k);
            x(to, t) += acc;
        }
        for (int j = 0; j < n; ++j)
            if (std::abs(x(j, t)) > 1e12)
                throw NumericalError("simulate: divergent recursion at node " + std::to_string(j) +
                                     ", step " + std::to_string(t));
    }
    return x;
}

namespace detail {

inline double sample_var(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    const double mean = row.mean();
    return (row.array() - mean).square().mean();
}

// Grid average of |[(I-H)^{-1}]_{ji} - delta_ji|^2 over the unit circle.
// Row j maps per-node noise variances to node j's network-contribution
// variance, since x - e = ((I-H)^{-1} - I) e with independent noises.
inline Eigen::MatrixXd signal_gain_matrix(const NetworkSpec& spec, int k_grid = 256) {
    const int n = spec.n;
    Eigen::MatrixXd gain = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k < k_grid; ++k) {
        const double omega = -std::numbers::pi + 2.0 * std::numbers::pi * k / k_grid;
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
        for (const auto& [key, taps] : spec.edges) {
            std::complex<double> acc = 0.0;
            for (std::size_t q = 1; q < taps.size(); ++q)
                acc += taps[q] * std::exp(std::complex<double>(0.0, -omega * static_cast<double>(q)));
            h(key.second, key.first) = acc;
        }
        const Eigen::MatrixXcd g =
            (Eigen::MatrixXcd::Identity(n, n) - h).partialPivLu().solve(Eigen::MatrixXcd::Identity(n, n)) -
            Eigen::MatrixXcd::Identity(n, n);
        gain += g.cwiseAbs2() / static_cast<double>(k_grid);
    }
    return gain;
}

// Solves the linear SNR-matching system snr_target * v_j = sum_i M_ji v_i
// for the noise variances v of driven nodes (sources stay fixed). Returns
// false when the system has no positive solution (possible with feedback
// loops); callers then rely on the fixed-point refinement alone.
inline bool analytic_snr_init(const NetworkSpec& spec, double snr_target, std::vector<double>& sigma) {
    const auto deg = spec.in_degree();
    std::vector<int> driven;
    for (int j = 0; j < spec.n; ++j)
        if (deg[j] > 0) driven.push_back(j);
    if (driven.empty()) return true;

    const Eigen::MatrixXd gain = signal_gain_matrix(spec);
    const int d = static_cast<int>(driven.size());
    Eigen::MatrixXd a(d, d);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c)
            a(r, c) = (r == c ? snr_target : 0.0) - gain(driven[r], driven[c]);
        for (int i = 0; i < spec.n; ++i)
            if (deg[i] == 0) b(r) += gain(driven[r], i) * sigma[i] * sigma[i];
    }
    const Eigen::VectorXd v = a.partialPivLu().solve(b);
    if (!v.allFinite() || (v.array() <= 0.0).any()) return false;
    for (int r = 0; r < d; ++r) sigma[driven[r]] = std::sqrt(v(r));
    return true;
}

} // namespace detail

/// Simulates `spec` for burn_in + t steps and discards the burn-in. When
/// snr_target > 0, noise_std of nodes with inbound edges is rescaled by up
/// to 5 fixed-point passes so var(x_j - e_j)/var(e_j) lands near the target.
/// The same unit-noise realization is reused across passes, so the output
/// is fully determined by (spec, t, snr_target, burn_in).
inline SimulationResult simulate(const NetworkSpec& spec, long t, double snr_target = 0.0,
                                 long burn_in = 500) {
    if (t < 1) throw ConfigError("simulate: need t >= 1");
    if (burn_in < 0) throw ConfigError("simulate: burn_in must be >= 0");
    const int n = spec.n;
    const long total = burn_in + t;

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd u(n, total);
    for (int j = 0; j < n; ++j)
        for (long s = 0; s < total; ++s) u(j, s) = gauss(rng);

    const auto deg = spec.in_degree();
    std::vector<double> sigma = spec.noise_std;
    if (snr_target > 0.0) detail::analytic_snr_init(spec, snr_target, sigma);
    Eigen::MatrixXd x;
    std::vector<double> snr(n, 0.0);

    const int max_passes = snr_target > 0.0 ? 5 : 1;
    for (int pass = 0; pass < max_passes; ++pass) {
        x = run_recursion(spec, sigma, u);
        bool all_ok = true;
        for (int j = 0; j < n; ++j) {
            if (deg[j] == 0) {
                snr[j] = 0.0;
                continue;
            }
            const Eigen::RowVectorXd e = sigma[j] * u.row(j).tail(t);
            const Eigen::RowVectorXd signal = x.row(j).tail(t) - e;
            const double ve = detail::sample_var(e);
            snr[j] = ve > 0.0 ? detail::sample_var(signal) / ve : 0.0;
            if (snr_target > 0.0 && snr[j] > 0.0) {
                if (std::abs(snr[j] - snr_target) > 0.2 * snr_target) all_ok = false;
            }
        }
        if (snr_target <= 0.0 || all_ok) break;
        if (pass + 1 < max_passes) {
            for (int j = 0; j < n; ++j)
                if (deg[j] > 0 && snr[j] > 0.0) sigma[j] *= std::sqrt(snr[j] / snr_target);
        }
    }

    SimulationResult out;
    out.ts.data = x.rightCols(t);
    for (int j = 0; j < n; ++j) {
        out.ts.node_ids.push_back("x" + std::to_string(j));
        const double mean = out.ts.data.row(j).mean();
        out.ts.data.row(j).array() -= mean;
    }
    out.ts.mean_removed = true;
    out.achieved_snr = snr;
    out.effective_noise_std = sigma;
    return out;
}

} // namespace netid

#endif // NETID_NETSIM_HPP
