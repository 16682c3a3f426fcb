// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

// Batch front-end: simulate a ground-truth network, identify a sparse
// topology from multivariate series, compare against the truth.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "netid/correlation.hpp"
#include "netid/graphio.hpp"
#include "netid/netsim.hpp"
#include "netid/serialize.hpp"
#include "netid/sparsifiers.hpp"
#include "netid/timeseries.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw netid::IoError("cannot open " + path);
    std::uint64_t h = 1469598103934665603ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    return h;
}

netid::Topology spec_to_topology(const netid::NetworkSpec& spec) {
    netid::Topology topo;
    topo.n = spec.n;
    for (int i = 0; i < spec.n; ++i) topo.node_ids.push_back("x" + std::to_string(i));
    topo.residuals.assign(spec.n, 0.0);
    for (const auto& [key, taps] : spec.edges) {
        double norm = 0.0;
        for (double h : taps) norm += h * h;
        topo.edges.push_back({key.first, key.second, norm});
    }
    std::sort(topo.edges.begin(), topo.edges.end());
    return topo;
}

struct SimulateOptions {
    int nodes = 20;
    int order = 5;
    long steps = 2000;
    double snr = 4.0;
    std::uint64_t seed = 0;
    int in_degree = 2;
    double density = -1.0;
    long burn_in = 500;
    std::string out_prefix;
};

int run_simulate(const SimulateOptions& opt) {
    netid::NetworkSpec spec =
        opt.density >= 0.0 ? netid::random_spec(opt.nodes, -1, opt.density, opt.order, opt.seed)
                           : netid::random_spec(opt.nodes, opt.in_degree, -1.0, opt.order, opt.seed);
    netid::SimulationResult sim = netid::simulate(spec, opt.steps, opt.snr, opt.burn_in);
    spec.noise_std = sim.effective_noise_std;

    netid::write_csv(sim.ts, opt.out_prefix + "_data.csv");
    netid::write_json_file(netid::to_json(spec), opt.out_prefix + "_spec.json");

    std::cout << "wrote " << opt.out_prefix << "_data.csv (" << opt.nodes << "x" << opt.steps << ") and "
              << opt.out_prefix << "_spec.json\n";
    std::cout << "achieved SNR per node:";
    for (double s : sim.achieved_snr) std::cout << " " << s;
    std::cout << "\n";
    return 0;
}

struct IdentifyOptions {
    std::string input;
    std::string method = "cols";
    std::string m = "2";
    int half_width = 10;
    int l_max = -1; // default 2*half_width
    double ridge = -1.0;
    int rwls_iterations = 10;
    double auto_threshold = 0.20;
    double threshold = 0.0;
    long budget = 1000000;
    int jobs = 0; // 0 = hardware concurrency
    bool log_ret = false;
    bool spline = false;
    bool no_cache = false;
    std::string out_prefix;
};

netid::CovarianceModel load_or_estimate(const IdentifyOptions& opt, const netid::TimeSeriesSet& ts,
                                        int l_max) {
    const std::string cache_path = opt.input + ".covcache.json";
    const std::uint64_t key = fnv1a_file(opt.input) ^ (static_cast<std::uint64_t>(l_max) * 0x9e3779b97f4a7c15ULL);
    if (!opt.no_cache && std::filesystem::exists(cache_path)) {
        try {
            const netid::json j = netid::read_json_file(cache_path);
            if (j.value("key", std::uint64_t{0}) == key) return netid::covariances_from_json(j.at("model"));
        } catch (const std::exception&) {
            // stale or corrupt cache; fall through and recompute
        }
    }
    netid::CovarianceModel model = netid::estimate_covariances(ts, l_max);
    if (!opt.no_cache) {
        netid::json j{{"key", key}, {"model", netid::to_json(model)}};
        netid::write_json_file(j, cache_path);
    }
    return model;
}

int run_identify(const IdentifyOptions& opt) {
    netid::SparsifierConfig cfg;
    if (opt.m == "auto") {
        cfg.m = netid::SparsifierConfig::kAuto;
    } else {
        try {
            cfg.m = std::stoi(opt.m);
        } catch (const std::exception&) {
            throw netid::ConfigError("--m must be a nonnegative integer or 'auto'");
        }
        if (cfg.m < 0) throw netid::ConfigError("--m must be a nonnegative integer or 'auto'");
    }
    cfg.half_width = opt.half_width;
    cfg.ridge = opt.ridge;
    cfg.rwls_iterations = opt.rwls_iterations;
    cfg.auto_threshold = opt.auto_threshold;
    cfg.enumeration_budget = opt.budget;
    cfg.validate();

    netid::Method method;
    if (opt.method == "cols") method = netid::Method::Cols;
    else if (opt.method == "rwls") method = netid::Method::Rwls;
    else if (opt.method == "exhaustive") method = netid::Method::Exhaustive;
    else throw netid::ConfigError("--method must be exhaustive, cols, or rwls");
    if (method == netid::Method::Exhaustive && cfg.m == netid::SparsifierConfig::kAuto)
        throw netid::ConfigError("--m auto requires --method cols or rwls");
    if (opt.threshold < 0.0 || opt.threshold >= 1.0)
        throw netid::ConfigError("--threshold must be in [0, 1)");

    auto series = netid::load_csv(opt.input);
    if (opt.spline) {
        for (auto& s : series) {
            std::vector<std::int64_t> grid;
            for (std::int64_t g = s.timestamps.front(); g <= s.timestamps.back(); ++g) grid.push_back(g);
            s = netid::spline_fill(s, grid);
        }
    }
    if (opt.log_ret)
        for (auto& s : series) s = netid::log_returns(s);
    const netid::TimeSeriesSet ts = netid::assemble(series);

    const int l_max = opt.l_max >= 0 ? opt.l_max : 2 * cfg.half_width;
    const netid::CovarianceModel model = load_or_estimate(opt, ts, l_max);

    const int jobs = opt.jobs > 0 ? opt.jobs : static_cast<int>(std::thread::hardware_concurrency());
    netid::Topology topo = netid::identify_all(model, cfg, method, ts.node_ids, std::max(1, jobs));
    if (opt.threshold > 0.0) topo = netid::threshold_edges(topo, opt.threshold);

    netid::write_json_file(netid::to_json(topo), opt.out_prefix + "_topology.json");
    netid::export_dot(topo, opt.out_prefix + "_topology.dot");
    std::cout << "identified " << topo.edges.size() << " edges over " << topo.n << " nodes; wrote "
              << opt.out_prefix << "_topology.json and " << opt.out_prefix << "_topology.dot\n";
    return 0;
}

int run_compare(const std::string& truth_path, const std::string& estimated_path) {
    const netid::json jt = netid::read_json_file(truth_path);
    netid::Topology truth;
    if (jt.contains("noise_std")) truth = spec_to_topology(netid::spec_from_json(jt));
    else truth = netid::topology_from_json(jt);
    const netid::Topology estimated = netid::topology_from_json(netid::read_json_file(estimated_path));
    const netid::ComparisonReport rep = netid::compare(truth, estimated);
    std::cout << netid::to_json(rep).dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse network topology identification from multivariate time series"};
    app.require_subcommand(1);

    SimulateOptions sim_opt;
    auto* sim = app.add_subcommand("simulate", "generate a random network and simulate its dynamics");
    sim->add_option("--nodes", sim_opt.nodes, "node count")->check(CLI::Range(2, 10000));
    sim->add_option("--order", sim_opt.order, "FIR order of edge filters")->check(CLI::PositiveNumber);
    sim->add_option("--steps", sim_opt.steps, "samples to keep")->check(CLI::PositiveNumber);
    sim->add_option("--snr", sim_opt.snr, "target SNR for driven nodes (0 disables matching)");
    sim->add_option("--seed", sim_opt.seed, "RNG seed");
    sim->add_option("--in-degree", sim_opt.in_degree, "parents per node");
    sim->add_option("--density", sim_opt.density, "edge probability per ordered pair (overrides --in-degree)");
    sim->add_option("--burn-in", sim_opt.burn_in, "discarded warmup samples");
    sim->add_option("--out-prefix", sim_opt.out_prefix, "output path prefix")->required();

    IdentifyOptions id_opt;
    auto* ident = app.add_subcommand("identify", "estimate a sparse topology from a CSV of series");
    ident->add_option("--input", id_opt.input, "input CSV")->required();
    ident->add_option("--method", id_opt.method, "exhaustive | cols | rwls");
    ident->add_option("--m", id_opt.m, "per-node degree bound, or 'auto'");
    ident->add_option("--L", id_opt.half_width, "filter half-width (order 2L+1)");
    ident->add_option("--lmax", id_opt.l_max, "covariance lag bound (default 2L)");
    ident->add_option("--ridge", id_opt.ridge, "ridge regularization (default proportional)");
    ident->add_option("--rwls-iterations", id_opt.rwls_iterations, "RWLS iteration count");
    ident->add_option("--auto-threshold", id_opt.auto_threshold, "residual-reduction fraction for --m auto");
    ident->add_option("--threshold", id_opt.threshold, "drop edges below this fraction of the max weight");
    ident->add_option("--budget", id_opt.budget, "exhaustive enumeration budget");
    ident->add_option("--jobs", id_opt.jobs, "parallel workers (0 = auto)");
    ident->add_flag("--log-returns", id_opt.log_ret, "transform series to logarithmic returns");
    ident->add_flag("--spline-fill", id_opt.spline, "fill gaps by natural cubic splines on the daily grid");
    ident->add_flag("--no-cache", id_opt.no_cache, "disable the covariance cache sidecar");
    ident->add_option("--out-prefix", id_opt.out_prefix, "output path prefix")->required();

    std::string truth_path, estimated_path;
    auto* cmp = app.add_subcommand("compare", "score an estimated topology against ground truth");
    cmp->add_option("--truth", truth_path, "ground-truth spec or topology JSON")->required();
    cmp->add_option("--estimated", estimated_path, "estimated topology JSON")->required();

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return run_simulate(sim_opt);
        if (ident->parsed()) return run_identify(id_opt);
        if (cmp->parsed()) return run_compare(truth_path, estimated_path);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    } catch (const netid::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const netid::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
