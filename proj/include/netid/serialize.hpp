// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef NETID_SERIALIZE_HPP
#define NETID_SERIALIZE_HPP

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "netid/correlation.hpp"
#include "netid/errors.hpp"
#include "netid/graphio.hpp"
#include "netid/netsim.hpp"
#include "netid/timeseries.hpp"
#include "netid/wiener.hpp"

namespace netid {

using json = nlohmann::json;

// ---- TimeSeriesSet: {node_ids, T, rows} ----

inline json to_json(const TimeSeriesSet& ts) {
    json rows = json::array();
    for (int i = 0; i < ts.n(); ++i) {
        json row = json::array();
        for (long t = 0; t < ts.t(); ++t) row.push_back(ts.data(i, t));
        rows.push_back(std::move(row));
    }
    return json{{"node_ids", ts.node_ids}, {"T", ts.t()}, {"rows", rows}, {"mean_removed", ts.mean_removed}};
}

inline TimeSeriesSet timeseries_from_json(const json& j) {
    TimeSeriesSet ts;
    ts.node_ids = j.at("node_ids").get<std::vector<std::string>>();
    const long t = j.at("T").get<long>();
    const auto& rows = j.at("rows");
    ts.data.resize(static_cast<long>(rows.size()), t);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (static_cast<long>(rows[i].size()) != t) throw ParseError("timeseries JSON: ragged rows");
        for (long k = 0; k < t; ++k) ts.data(static_cast<long>(i), k) = rows[i][k].get<double>();
    }
    ts.mean_removed = j.value("mean_removed", false);
    return ts;
}

// ---- CovarianceModel: {n, L_max, T, entries} ----

inline json to_json(const CovarianceModel& model) {
    json entries = json::array();
    for (int i = 0; i < model.n(); ++i)
        for (int j = i; j < model.n(); ++j)
            for (int tau = -model.l_max(); tau <= model.l_max(); ++tau) {
                if (i == j && tau < 0) continue; // recovered by symmetry
                entries.push_back(json{{"i", i}, {"j", j}, {"tau", tau}, {"r", model.r(i, j, tau)}});
            }
    return json{{"n", model.n()}, {"L_max", model.l_max()}, {"T", model.t()}, {"entries", entries}};
}

inline CovarianceModel covariances_from_json(const json& j) {
    CovarianceModel model(j.at("n").get<int>(), j.at("L_max").get<int>(), j.at("T").get<long>());
    for (const auto& e : j.at("entries"))
        model.set_symmetric(e.at("i").get<int>(), e.at("j").get<int>(), e.at("tau").get<int>(),
                            e.at("r").get<double>());
    return model;
}

// ---- WienerSolution: {target, inputs, L, taps, residual_variance} ----

inline json to_json(const WienerSolution& sol) {
    json taps = json::array();
    for (const auto& t : sol.taps) {
        json v = json::array();
        for (long k = 0; k < t.size(); ++k) v.push_back(t(k));
        taps.push_back(std::move(v));
    }
    return json{{"target", sol.request.target},
                {"inputs", sol.request.inputs},
                {"L", sol.request.half_width},
                {"taps", taps},
                {"residual_variance", sol.residual_variance}};
}

// ---- NetworkSpec: {n, seed, noise_std, edges} ----

inline json to_json(const NetworkSpec& spec) {
    json edges = json::array();
    for (const auto& [key, taps] : spec.edges)
        edges.push_back(json{{"from", key.first}, {"to", key.second}, {"taps", taps}});
    return json{{"n", spec.n}, {"seed", spec.seed}, {"noise_std", spec.noise_std}, {"edges", edges}};
}

inline NetworkSpec spec_from_json(const json& j) {
    NetworkSpec spec;
    spec.n = j.at("n").get<int>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.noise_std = j.at("noise_std").get<std::vector<double>>();
    for (const auto& e : j.at("edges")) {
        const int from = e.at("from").get<int>();
        const int to = e.at("to").get<int>();
        auto taps = e.at("taps").get<std::vector<double>>();
        if (from == to) throw ParseError("spec JSON: self-edge");
        if (!taps.empty() && taps[0] != 0.0) throw ParseError("spec JSON: edge filter must have h[0] = 0");
        spec.edges[{from, to}] = std::move(taps);
    }
    return spec;
}

// ---- Topology: {n, node_ids, edges, residuals} ----

inline json to_json(const Topology& topo) {
    json edges = json::array();
    for (const auto& e : topo.edges)
        edges.push_back(json{{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
    return json{{"n", topo.n}, {"node_ids", topo.node_ids}, {"edges", edges}, {"residuals", topo.residuals}};
}

inline Topology topology_from_json(const json& j) {
    Topology topo;
    topo.n = j.at("n").get<int>();
    topo.node_ids = j.at("node_ids").get<std::vector<std::string>>();
    for (const auto& e : j.at("edges"))
        topo.edges.push_back({e.at("from").get<int>(), e.at("to").get<int>(), e.at("weight").get<double>()});
    topo.residuals = j.value("residuals", std::vector<double>(topo.n, 0.0));
    std::sort(topo.edges.begin(), topo.edges.end());
    topo.validate();
    return topo;
}

inline json to_json(const ComparisonReport& rep) {
    return json{{"true_positives", rep.true_positives}, {"false_positives", rep.false_positives},
                {"false_negatives", rep.false_negatives}, {"precision", rep.precision},
                {"recall", rep.recall}, {"f1", rep.f1}};
}

// ---- file helpers ----

inline void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for " + path);
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// CSV with a leading integer time column; mirrors what load_csv ingests.
inline void write_csv(const TimeSeriesSet& ts, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "t";
    for (const auto& id : ts.node_ids) out << "," << id;
    out << "\n";
    out.precision(17);
    for (long t = 0; t < ts.t(); ++t) {
        out << t;
        for (int i = 0; i < ts.n(); ++i) out << "," << ts.data(i, t);
        out << "\n";
    }
    if (!out) throw IoError("write failed for " + path);
}

} // namespace netid

#endif // NETID_SERIALIZE_HPP
