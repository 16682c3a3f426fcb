// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef NETID_SPARSIFIERS_HPP
#define NETID_SPARSIFIERS_HPP

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "netid/errors.hpp"
#include "netid/graphio.hpp"
#include "netid/wiener.hpp"

namespace netid {

enum class Method { Exhaustive, Cols, Rwls };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::Exhaustive: return "exhaustive";
        case Method::Cols: return "cols";
        case Method::Rwls: return "rwls";
    }
    return "?";
}

struct SparsifierConfig {
    int m = 2;                   // per-node degree bound; kAuto for the self-tuning rule
    int half_width = 10;         // FIR order 2L+1
    double ridge = -1.0;         // < 0: proportional default (see wiener)
    int rwls_iterations = 10;
    double rwls_epsilon = 1e-6;  // weight floor, relative to target variance
    double rwls_lambda = 0.1;    // penalty strength, relative to target variance
    double rwls_initial_weight = 0.0; // 0: first iteration unpenalized
    double auto_threshold = 0.20; // accept a degree only for >= this residual reduction
    long enumeration_budget = 1000000;
    double improvement_tol = 1e-9; // COLS strict-improvement margin

    static constexpr int kAuto = -1;

    void validate() const {
        if (rwls_iterations < 1) throw ConfigError("config: rwls_iterations must be >= 1");
        if (rwls_epsilon <= 0.0) throw ConfigError("config: rwls_epsilon must be > 0");
        if (auto_threshold <= 0.0 || auto_threshold >= 1.0)
            throw ConfigError("config: auto_threshold must be in (0, 1)");
        if (m < 0 && m != kAuto) throw ConfigError("config: m must be >= 0 or AUTO");
    }
};

struct ColsPass {
    int slot = 0;
    int chosen = -1; // -1 = slot left null
    bool changed = false;
    double residual_before = 0.0;
    double residual_after = 0.0;
};

struct SelectionTrace {
    std::vector<ColsPass> cols_passes;
    std::vector<std::vector<double>> rwls_weights; // per iteration
    std::vector<double> residuals;                 // per iteration / candidate set
};

struct SelectionResult {
    int target = 0;
    std::vector<int> selected;
    WienerSolution solution; // unpenalized projection on `selected`
    Method method = Method::Cols;
    SelectionTrace trace;
};

namespace detail {

inline std::vector<int> candidates_for(int n, int target) {
    std::vector<int> out;
    out.reserve(n - 1);
    for (int i = 0; i < n; ++i)
        if (i != target) out.push_back(i);
    return out;
}

inline double subset_residual(const CovarianceModel& model, int target, std::vector<int> inputs,
                              const SparsifierConfig& config) {
    std::sort(inputs.begin(), inputs.end());
    ProjectionRequest req{target, std::move(inputs), config.half_width, config.ridge};
    return project(model, req).residual_variance;
}

inline WienerSolution final_projection(const CovarianceModel& model, int target, std::vector<int> selected,
                                       const SparsifierConfig& config) {
    std::sort(selected.begin(), selected.end());
    ProjectionRequest req{target, std::move(selected), config.half_width, config.ridge};
    return project(model, req);
}

inline long binomial_capped(long n, long k, long cap) {
    if (k < 0 || k > n) return 0;
    long result = 1;
    for (long i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
        if (result > cap) return cap + 1;
    }
    return result;
}

} // namespace detail

/// Global minimum over all subsets of size min(m, n-1). Ties break to the
/// lexicographically smallest index list.
inline SelectionResult exhaustive_identify(const CovarianceModel& model, int target,
                                           const SparsifierConfig& config) {
    config.validate();
    if (config.m == SparsifierConfig::kAuto)
        throw ConfigError("exhaustive_identify: m must be fixed, not AUTO");
    const int n = model.n();
    const int m = std::min(config.m, n - 1);
    if (detail::binomial_capped(n - 1, m, config.enumeration_budget) > config.enumeration_budget)
        throw ConfigError("exhaustive_identify: C(" + std::to_string(n - 1) + "," + std::to_string(m) +
                          ") exceeds the enumeration budget of " + std::to_string(config.enumeration_budget) +
                          "; use cols or rwls");

    SelectionResult result;
    result.target = target;
    result.method = Method::Exhaustive;

    const auto cand = detail::candidates_for(n, target);
    std::vector<int> best;
    double best_residual = std::numeric_limits<double>::infinity();
    if (m == 0) {
        best_residual = model.r(target, target, 0);
    } else {
        std::vector<int> pick(m);
        std::iota(pick.begin(), pick.end(), 0);
        while (true) {
            std::vector<int> subset(m);
            for (int i = 0; i < m; ++i) subset[i] = cand[pick[i]];
            const double res = detail::subset_residual(model, target, subset, config);
            result.trace.residuals.push_back(res);
            // lexicographic enumeration + strict < keeps the smallest tied list
            if (res < best_residual) {
                best_residual = res;
                best = subset;
            }
            // next combination in lexicographic order
            int i = m - 1;
            while (i >= 0 && pick[i] == static_cast<int>(cand.size()) - m + i) --i;
            if (i < 0) break;
            ++pick[i];
            for (int k = i + 1; k < m; ++k) pick[k] = pick[k - 1] + 1;
        }
    }
    result.selected = best;
    result.solution = detail::final_projection(model, target, best, config);
    return result;
}

/// Greedy coordinate descent over m selection slots. Each pass re-optimizes
/// one slot against every unused candidate plus "keep current"; a swap is
/// accepted only for a strict residual decrease. Stops after a full cycle
/// with no change.
inline SelectionResult cols_identify(const CovarianceModel& model, int target,
                                     const SparsifierConfig& config) {
    config.validate();
    if (config.m == SparsifierConfig::kAuto) throw ConfigError("cols_identify: m must be fixed, not AUTO");
    const int n = model.n();
    const int m = std::min(config.m, n - 1);

    SelectionResult result;
    result.target = target;
    result.method = Method::Cols;

    std::vector<int> slots(m, -1); // -1 = null series
    if (m > 0) {
        auto current_set = [&]() {
            std::vector<int> s;
            for (int v : slots)
                if (v >= 0) s.push_back(v);
            return s;
        };
        double current_residual = model.r(target, target, 0);
        const long pass_cap = static_cast<long>(n) * m * 10;
        long passes = 0;
        int c = 0;
        int k = 0;
        while (c <= m) {
            if (++passes > pass_cap)
                throw NumericalError("cols_identify: pass cap reached for target " + std::to_string(target));
            // best replacement for slot k, keep-current included
            int best_i = slots[k];
            double best_res = current_residual;
            for (int i = 0; i < n; ++i) {
                if (i == target || i == slots[k]) continue;
                if (std::find(slots.begin(), slots.end(), i) != slots.end()) continue;
                std::vector<int> trial;
                for (int s = 0; s < m; ++s) {
                    const int v = (s == k) ? i : slots[s];
                    if (v >= 0) trial.push_back(v);
                }
                const double res = detail::subset_residual(model, target, trial, config);
                // ascending candidate order: ties keep the lowest index
                if (res < best_res - config.improvement_tol) {
                    best_res = res;
                    best_i = i;
                }
            }
            ColsPass rec;
            rec.slot = k;
            rec.residual_before = current_residual;
            if (best_i != slots[k]) {
                slots[k] = best_i;
                current_residual = best_res;
                rec.changed = true;
                c = 1;
            } else {
                rec.changed = false;
                ++c;
            }
            rec.chosen = slots[k];
            rec.residual_after = current_residual;
            result.trace.cols_passes.push_back(rec);
            result.trace.residuals.push_back(current_residual);
            k = (k + 1) % m;
        }
        result.selected = current_set();
    }
    std::sort(result.selected.begin(), result.selected.end());
    result.solution = detail::final_projection(model, target, result.selected, config);
    return result;
}

/// Solves the full-candidate projection with a per-channel quadratic
/// penalty lambda * mu_k on channel k's diagonal block. An infinite weight
/// excludes the channel (zero taps).
inline WienerSolution solve_weighted_projection(const CovarianceModel& model, int target,
                                                const std::vector<double>& weights,
                                                const SparsifierConfig& config) {
    config.validate();
    const int n = model.n();
    if (static_cast<int>(weights.size()) != n)
        throw DimensionError("solve_weighted_projection: need one weight per node");
    std::vector<int> active;
    for (int i = 0; i < n; ++i) {
        if (i == target) continue;
        if (weights[i] < 0.0) throw ConfigError("solve_weighted_projection: negative weight");
        if (std::isfinite(weights[i])) active.push_back(i);
    }
    if (active.empty()) throw ConfigError("solve_weighted_projection: all weights infinite");

    const int l = config.half_width;
    const int width = 2 * l + 1;
    ProjectionRequest active_req{target, active, l, config.ridge};
    detail::validate_request(model, active_req);

    Eigen::MatrixXd gram;
    Eigen::VectorXd rhs;
    detail::build_normal_equations(model, target, active, l, gram, rhs);
    const double ridge = detail::effective_ridge(active_req, gram);
    const double lambda = config.rwls_lambda * model.r(target, target, 0);
    Eigen::MatrixXd reg = gram;
    reg.diagonal().array() += ridge;
    for (std::size_t c = 0; c < active.size(); ++c)
        reg.diagonal().segment(static_cast<int>(c) * width, width).array() += lambda * weights[active[c]];

    Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
    const Eigen::VectorXd w = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !w.allFinite())
        throw NumericalError("solve_weighted_projection: singular system for target " + std::to_string(target));

    WienerSolution sol;
    sol.request.target = target;
    sol.request.inputs = detail::candidates_for(n, target);
    sol.request.half_width = l;
    sol.request.ridge = config.ridge;
    sol.taps.assign(sol.request.inputs.size(), Eigen::VectorXd::Zero(width));
    std::size_t a = 0;
    for (std::size_t c = 0; c < sol.request.inputs.size(); ++c) {
        if (a < active.size() && active[a] == sol.request.inputs[c]) {
            sol.taps[c] = w.segment(static_cast<int>(a) * width, width);
            ++a;
        }
    }
    sol.residual_variance =
        std::max(0.0, model.r(target, target, 0) - 2.0 * rhs.dot(w) + w.dot(gram * w));
    return sol;
}

/// Iterated penalized projections with inverse-norm weight updates, then a
/// hard selection of the m largest-norm channels refit without penalty.
inline SelectionResult rwls_identify(const CovarianceModel& model, int target,
                                     const SparsifierConfig& config) {
    config.validate();
    if (config.m == SparsifierConfig::kAuto) throw ConfigError("rwls_identify: m must be fixed, not AUTO");
    const int n = model.n();
    const int m = std::min(config.m, n - 1);

    SelectionResult result;
    result.target = target;
    result.method = Method::Rwls;

    const double target_var = model.r(target, target, 0);
    const double eps = config.rwls_epsilon * std::max(target_var, 1e-300);
    std::vector<double> mu(n, config.rwls_initial_weight);
    mu[target] = 0.0;

    WienerSolution sol;
    for (int it = 0; it < config.rwls_iterations; ++it) {
        result.trace.rwls_weights.push_back(mu);
        sol = solve_weighted_projection(model, target, mu, config);
        result.trace.residuals.push_back(sol.residual_variance);
        double mean = 0.0;
        for (std::size_t c = 0; c < sol.request.inputs.size(); ++c) {
            mu[sol.request.inputs[c]] = 1.0 / (sol.channel_norm(c) + eps);
            mean += mu[sol.request.inputs[c]];
        }
        mean /= static_cast<double>(sol.request.inputs.size());
        for (int i : sol.request.inputs) mu[i] /= mean;
    }

    // rank channels by final norm, keep the m largest (ties to lower index)
    std::vector<std::size_t> order(sol.request.inputs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return sol.channel_norm(a) > sol.channel_norm(b);
    });
    for (int k = 0; k < m && k < static_cast<int>(order.size()); ++k)
        result.selected.push_back(sol.request.inputs[order[k]]);
    std::sort(result.selected.begin(), result.selected.end());
    result.solution = detail::final_projection(model, target, result.selected, config);
    return result;
}

/// Grows the degree bound from 1, accepting each step only when it cuts the
/// residual by at least auto_threshold relative to the previous degree.
inline SelectionResult auto_degree_identify(const CovarianceModel& model, int target,
                                            const SparsifierConfig& config, Method inner) {
    if (inner == Method::Exhaustive)
        throw ConfigError("auto_degree_identify: inner method must be cols or rwls");
    SparsifierConfig cfg = config;
    cfg.m = 0;
    cfg.validate();

    SelectionResult accepted;
    accepted.target = target;
    accepted.method = inner;
    accepted.solution = detail::final_projection(model, target, {}, cfg);
    double prev_residual = accepted.solution.residual_variance;

    const int n = model.n();
    for (int m = 1; m <= n - 1; ++m) {
        cfg.m = m;
        SelectionResult trial = inner == Method::Cols ? cols_identify(model, target, cfg)
                                                      : rwls_identify(model, target, cfg);
        if (trial.solution.residual_variance <= (1.0 - config.auto_threshold) * prev_residual) {
            prev_residual = trial.solution.residual_variance;
            accepted = std::move(trial);
        } else {
            break;
        }
    }
    return accepted;
}

/// Runs the chosen per-node identifier for every node and assembles the
/// directed topology: edge i -> j for each selected input i of node j,
/// weighted by channel norm.
inline Topology identify_all(const CovarianceModel& model, const SparsifierConfig& config, Method method,
                             std::vector<std::string> node_ids = {}, int jobs = 1) {
    config.validate();
    const int n = model.n();
    if (node_ids.empty())
        for (int i = 0; i < n; ++i) node_ids.push_back("x" + std::to_string(i));
    if (static_cast<int>(node_ids.size()) != n) throw DimensionError("identify_all: node_ids size mismatch");

    auto solve_node = [&](int j) -> SelectionResult {
        try {
            if (config.m == SparsifierConfig::kAuto) return auto_degree_identify(model, j, config, method);
            switch (method) {
                case Method::Exhaustive: return exhaustive_identify(model, j, config);
                case Method::Cols: return cols_identify(model, j, config);
                case Method::Rwls: return rwls_identify(model, j, config);
            }
            throw ConfigError("identify_all: unknown method");
        } catch (const ConfigError& err) {
            throw ConfigError("node " + node_ids[j] + ": " + err.what());
        } catch (const DimensionError& err) {
            throw DimensionError("node " + node_ids[j] + ": " + err.what());
        } catch (const std::runtime_error& err) {
            throw NumericalError("node " + node_ids[j] + ": " + err.what());
        }
    };

    std::vector<SelectionResult> results(n);
    if (jobs > 1) {
        std::vector<std::future<SelectionResult>> futures;
        futures.reserve(n);
        for (int j = 0; j < n; ++j)
            futures.push_back(std::async(std::launch::async, solve_node, j));
        for (int j = 0; j < n; ++j) results[j] = futures[j].get();
    } else {
        for (int j = 0; j < n; ++j) results[j] = solve_node(j);
    }

    Topology topo;
    topo.n = n;
    topo.node_ids = std::move(node_ids);
    topo.residuals.resize(n);
    for (int j = 0; j < n; ++j) {
        topo.residuals[j] = results[j].solution.residual_variance;
        for (std::size_t c = 0; c < results[j].selected.size(); ++c)
            topo.edges.push_back({results[j].selected[c], j, results[j].solution.channel_norm(c)});
    }
    std::sort(topo.edges.begin(), topo.edges.end());
    return topo;
}

} // namespace netid

#endif // NETID_SPARSIFIERS_HPP
