// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0

#ifndef NETID_GRAPHIO_HPP
#define NETID_GRAPHIO_HPP

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "netid/errors.hpp"

namespace netid {

struct Edge {
    int from = 0;
    int to = 0;
    double weight = 0.0; // channel norm of the identified filter

    friend bool operator<(const Edge& a, const Edge& b) {
        return std::pair{a.from, a.to} < std::pair{b.from, b.to};
    }
};

/// Directed graph over node ids; per-node residuals come from the
/// identification step that produced it.
struct Topology {
    int n = 0;
    std::vector<std::string> node_ids;
    std::vector<Edge> edges; // kept sorted by (from, to)
    std::vector<double> residuals;

    void validate() const {
        for (const auto& e : edges) {
            if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
                throw DimensionError("topology: edge endpoint out of range");
            if (e.from == e.to) throw ConfigError("topology: self-edge at node " + std::to_string(e.from));
            if (e.weight < 0.0) throw ConfigError("topology: negative edge weight");
        }
    }
};

struct ComparisonReport {
    long true_positives = 0;
    long false_positives = 0;
    long false_negatives = 0;
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
};

/// Drops edges with weight < delta_rel * max weight of the input.
inline Topology threshold_edges(const Topology& topology, double delta_rel) {
    if (delta_rel < 0.0 || delta_rel >= 1.0)
        throw ConfigError("threshold_edges: delta_rel must be in [0, 1)");
    Topology out = topology;
    if (topology.edges.empty()) return out;
    double max_w = 0.0;
    for (const auto& e : topology.edges) max_w = std::max(max_w, e.weight);
    const double cut = delta_rel * max_w;
    out.edges.clear();
    for (const auto& e : topology.edges)
        if (e.weight >= cut) out.edges.push_back(e);
    return out;
}

/// Directed exact edge matching. Conventions: empty prediction scores
/// precision 1, empty truth scores recall 1, f1 = 0 when both ratios are 0.
inline ComparisonReport compare(const Topology& truth, const Topology& estimated) {
    if (truth.n != estimated.n || truth.node_ids != estimated.node_ids)
        throw DimensionError("compare: node sets differ");
    std::set<std::pair<int, int>> t, e;
    for (const auto& edge : truth.edges) t.insert({edge.from, edge.to});
    for (const auto& edge : estimated.edges) e.insert({edge.from, edge.to});

    ComparisonReport rep;
    for (const auto& p : e)
        (t.count(p) ? rep.true_positives : rep.false_positives)++;
    for (const auto& p : t)
        if (!e.count(p)) rep.false_negatives++;
    rep.precision = e.empty() ? 1.0 : static_cast<double>(rep.true_positives) / static_cast<double>(e.size());
    rep.recall = t.empty() ? 1.0 : static_cast<double>(rep.true_positives) / static_cast<double>(t.size());
    rep.f1 = (rep.precision + rep.recall) > 0.0
                 ? 2.0 * rep.precision * rep.recall / (rep.precision + rep.recall)
                 : 0.0;
    return rep;
}

/// DOT text, deterministically ordered by (from, to).
inline std::string to_dot(const Topology& topology) {
    std::ostringstream out;
    out << "digraph topology {\n";
    for (int i = 0; i < topology.n; ++i)
        out << "  \"" << topology.node_ids[i] << "\";\n";
    auto edges = topology.edges;
    std::sort(edges.begin(), edges.end());
    out.precision(12);
    for (const auto& e : edges)
        out << "  \"" << topology.node_ids[e.from] << "\" -> \"" << topology.node_ids[e.to]
            << "\" [label=\"" << e.weight << "\"];\n";
    out << "}\n";
    return out.str();
}

inline void export_dot(const Topology& topology, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("export_dot: cannot open " + path);
    out << to_dot(topology);
    if (!out) throw IoError("export_dot: write failed for " + path);
}

} // namespace netid

#endif // NETID_GRAPHIO_HPP
